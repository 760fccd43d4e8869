"""Unified inexact augmented Lagrangian solver for six matrix-separation models.

Every model decomposes a non-negative magnitude spectrogram ``X`` (m x n)
into an accompaniment part expressed in a dictionary ``D`` (m x k) and a
vocal part ``E``, subject to ``X = D Z + E``:

============  =========================================================
method        objective
============  =========================================================
``rpca``      ``||Z||_* + lam*||E||_1``                  (D = identity)
``rpcai``     rpca  + ``gamma/2*||E - E0||_F^2``         (D = identity)
``lrr``       ``||Z||_* + lam*||E||_1``
``lrri``      lrr   + ``gamma/2*||E - E0||_F^2``
``gsr``       ``||Z^T||_{2,1} + lam*||E||_1``
``gsri``      gsr   + ``gamma/2*||E - E0||_F^2``
============  =========================================================

The trace-norm models need a singular value decomposition each iteration;
the group-sparse models replace it with a row-wise soft threshold, which
keeps the per-iteration cost at O(k*n*(k+m)).

All six are solved by the same splitting.  Auxiliary variables ``J`` (for
the Z-regularizer) and ``B`` (for the l1 term) give the Lagrangian

    L = reg(J) + lam*||B||_1 + gamma/2*||E - E0||_F^2
        + <Y1, X - D Z - E> + <Y2, Z - J> + <Y3, E - B>
        + mu/2 * (||X - D Z - E||_F^2 + ||Z - J||_F^2 + ||E - B||_F^2)

which is minimized one block at a time (J, Z, B, E), followed by gradient
ascent on the multipliers and the penalty growth ``mu <- min(rho*mu,
mu_max)``.  With ``rho = 1`` this is plain ADMM; ``rho > 1`` gives the
faster inexact augmented Lagrangian variant.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .prox import as_matrix, soft_threshold, soft_threshold_rows, singular_value_threshold

__all__ = [
    "METHODS",
    "INFORMED_METHODS",
    "DICTIONARY_METHODS",
    "GROUP_SPARSE_METHODS",
    "ProblemSpec",
    "SolverConfig",
    "SolverState",
    "SeparationSolution",
    "default_config",
    "initial_state",
    "update_J",
    "update_Z",
    "update_B",
    "update_E",
    "update_multipliers",
    "solve",
]

METHODS = ("rpca", "rpcai", "lrr", "lrri", "gsr", "gsri")
INFORMED_METHODS = frozenset({"rpcai", "lrri", "gsri"})
DICTIONARY_METHODS = frozenset({"lrr", "lrri", "gsr", "gsri"})
GROUP_SPARSE_METHODS = frozenset({"gsr", "gsri"})


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


@dataclass
class ProblemSpec:
    """A separation problem: the spectrogram, the model, and its side inputs.

    Parameters
    ----------
    X : array, m x n
        Non-negative magnitude spectrogram.
    method : str
        One of ``rpca, rpcai, lrr, lrri, gsr, gsri``.
    D : array, m x k, optional
        Dictionary; required by the lrr/gsr families, forbidden for the
        rpca family (which uses the identity internally).
    E0 : array, m x n, optional
        Vocal annotations; required by the informed methods.
    groups : tuple of int, optional
        Contiguous column-block sizes of ``D`` (must sum to k).  Only used
        to split the activations into per-dictionary components afterwards.
    """

    X: np.ndarray
    method: str
    D: np.ndarray | None = None
    E0: np.ndarray | None = None
    groups: tuple | None = None

    def __post_init__(self):
        self.method = _check_method(self.method)
        self.X = as_matrix(self.X, "X")
        if np.any(self.X < 0):
            raise ValueError("X must be a non-negative magnitude spectrogram")
        m, n = self.X.shape
        if self.method in DICTIONARY_METHODS:
            if self.D is None:
                raise ValueError(f"method {self.method!r} requires a dictionary D")
            self.D = as_matrix(self.D, "D")
            if self.D.shape[0] != m:
                raise ValueError(
                    f"D has {self.D.shape[0]} rows but X has {m}; they must match"
                )
        elif self.D is not None:
            raise ValueError(f"method {self.method!r} uses D = identity; do not pass D")
        if self.method in INFORMED_METHODS:
            if self.E0 is None:
                raise ValueError(f"method {self.method!r} requires annotations E0")
            self.E0 = as_matrix(self.E0, "E0")
            if self.E0.shape != self.X.shape:
                raise ValueError(
                    f"E0 shape {self.E0.shape} must equal X shape {self.X.shape}"
                )
        if self.groups is not None:
            if self.D is None:
                raise ValueError("groups require a dictionary D")
            self.groups = tuple(int(g) for g in self.groups)
            if any(g < 1 for g in self.groups):
                raise ValueError("group block sizes must be positive")
            if sum(self.groups) != self.D.shape[1]:
                raise ValueError(
                    f"group sizes {self.groups} must sum to k={self.D.shape[1]}"
                )


@dataclass(frozen=True)
class SolverConfig:
    """Solver hyperparameters.

    ``gamma`` must be 0 for the uninformed methods.  ``rho >= 1`` makes the
    penalty sequence nondecreasing; ``rho = 1`` is plain ADMM.
    """

    lam: float
    gamma: float
    mu0: float = 1e-3
    rho: float = 1.2
    mu_max: float = 1e10
    tol: float = 1e-5
    max_iters: int = 1000

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.mu0 <= 0:
            raise ValueError("mu0 must be positive")
        if self.rho < 1:
            raise ValueError("rho must be >= 1 (nondecreasing mu schedule)")
        if self.mu_max <= 0:
            raise ValueError("mu_max must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def default_config(m, n, method):
    """Defaults for an m x n spectrogram: lam = 1/sqrt(max(m, n)), and for
    the informed methods gamma = 2/sqrt(max(m, n)), else gamma = 0."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    _check_method(method)
    scale = 1.0 / np.sqrt(max(m, n))
    gamma = 2.0 * scale if method in INFORMED_METHODS else 0.0
    return SolverConfig(lam=scale, gamma=gamma)


@dataclass
class SolverState:
    """One snapshot of the alternating iteration.

    Shapes: Z, J, Y2 are k x n; E, B, Y1, Y3 are m x n.
    """

    Z: np.ndarray
    J: np.ndarray
    E: np.ndarray
    B: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    Y3: np.ndarray
    mu: float
    iteration: int = 0


def initial_state(m, n, k, mu0):
    """Deterministic all-zero start."""
    return SolverState(
        Z=np.zeros((k, n)),
        J=np.zeros((k, n)),
        E=np.zeros((m, n)),
        B=np.zeros((m, n)),
        Y1=np.zeros((m, n)),
        Y2=np.zeros((k, n)),
        Y3=np.zeros((m, n)),
        mu=float(mu0),
    )


def update_J(state, method):
    """Minimize the Lagrangian in J: prox of the Z-regularizer at Z + Y2/mu.

    Group-sparse methods use the row-wise soft threshold; the trace-norm
    methods use singular value thresholding.  Threshold is 1/mu since the
    regularizer enters the objective with unit weight.
    """
    target = state.Z + state.Y2 / state.mu
    tau = 1.0 / state.mu
    if method in GROUP_SPARSE_METHODS:
        return soft_threshold_rows(target, tau)
    return singular_value_threshold(target, tau)


def update_Z(state, X, D, gram=None):
    """Minimize the Lagrangian in Z (unconstrained quadratic).

    Solves ``(I + D^T D) Z = D^T (X - E) + J + (D^T Y1 - Y2)/mu`` using a
    cached Cholesky factorization of the Gram matrix when provided.
    """
    if gram is None:
        gram = gram_factor(D)
    rhs = D.T @ (X - state.E) + state.J + (D.T @ state.Y1 - state.Y2) / state.mu
    return scipy.linalg.cho_solve(gram, rhs, check_finite=False)


def gram_factor(D):
    """Cholesky factorization of I + D^T D, computed once per solve."""
    k = D.shape[1]
    G = np.eye(k) + D.T @ D
    try:
        return scipy.linalg.cho_factor(G, check_finite=True)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            "factorization of I + D^T D failed; the dictionary likely "
            "contains non-finite values"
        ) from exc


def update_B(state, lam):
    """Minimize the Lagrangian in B: elementwise shrinkage of E + Y3/mu by lam/mu."""
    return soft_threshold(state.E + state.Y3 / state.mu, lam / state.mu)


def update_E(state, X, D, E0, gamma, DZ=None):
    """Minimize the Lagrangian in E (unconstrained quadratic).

    Stationarity gives ``E = (gamma*E0 + Y1 - Y3 + mu*(X - D Z) + mu*B) /
    (gamma + 2*mu)``; with gamma = 0 the annotation term vanishes.
    """
    if DZ is None:
        DZ = D @ state.Z
    mu = state.mu
    num = state.Y1 - state.Y3 + mu * (X - DZ) + mu * state.B
    if gamma > 0:
        num = num + gamma * E0
    return num / (gamma + 2.0 * mu)


def update_multipliers(state, X, D, rho, mu_max, DZ=None):
    """Ascent step on Y1, Y2, Y3 scaled by mu, then grow mu by rho (capped)."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    if DZ is None:
        DZ = D @ state.Z
    mu = state.mu
    return replace(
        state,
        Y1=state.Y1 + mu * (X - DZ - state.E),
        Y2=state.Y2 + mu * (state.Z - state.J),
        Y3=state.Y3 + mu * (state.E - state.B),
        mu=min(rho * mu, mu_max),
        iteration=state.iteration + 1,
    )


@dataclass
class SeparationSolution:
    """Result of :func:`solve`.

    ``A = D Z`` is the accompaniment magnitude, ``E`` the vocal magnitude.
    ``residual_history[t]`` is ``||X - D Z - E||_F / ||X||_F`` after
    iteration t+1.
    """

    Z: np.ndarray
    E: np.ndarray
    A: np.ndarray
    residual_history: list = field(default_factory=list)
    iters: int = 0
    converged: bool = False
    wall_time: float = 0.0


def _check_finite(name, M, iteration):
    if not np.isfinite(M).all():
        raise NumericalError(
            f"iterate {name} contains non-finite values at iteration {iteration}"
        )


def solve(spec, config=None):
    """Run the alternating solver until the constraint residual converges.

    Iterates J -> Z -> B -> E -> multiplier updates until
    ``||X - D Z - E||_F / ||X||_F < tol`` or ``max_iters`` is reached.
    Non-convergence is reported through ``converged=False``, not an error;
    non-finite iterates raise :class:`NumericalError`.

    Parameters
    ----------
    spec : ProblemSpec
    config : SolverConfig, optional
        Defaults to :func:`default_config` for the spectrogram shape.

    Returns
    -------
    SeparationSolution
    """
    if not isinstance(spec, ProblemSpec):
        raise ValueError("spec must be a ProblemSpec")
    X = spec.X
    m, n = X.shape
    if config is None:
        config = default_config(m, n, spec.method)
    if spec.method not in INFORMED_METHODS and config.gamma != 0.0:
        raise ValueError(f"gamma must be 0 exactly for uninformed method {spec.method!r}")

    D = spec.D if spec.D is not None else np.eye(m)
    k = D.shape[1]
    gram = gram_factor(D)

    norm_X = np.linalg.norm(X)
    denom = norm_X if norm_X > 0 else 1.0

    start = time.perf_counter()
    state = initial_state(m, n, k, config.mu0)
    history = []
    converged = False
    DZ = np.zeros((m, n))

    for _ in range(config.max_iters):
        state = replace(state, J=update_J(state, spec.method))
        state = replace(state, Z=update_Z(state, X, D, gram))
        state = replace(state, B=update_B(state, config.lam))
        DZ = D @ state.Z
        state = replace(state, E=update_E(state, X, D, spec.E0, config.gamma, DZ))
        for name in ("J", "Z", "B", "E"):
            _check_finite(name, getattr(state, name), state.iteration + 1)
        state = update_multipliers(state, X, D, config.rho, config.mu_max, DZ)
        residual = np.linalg.norm(X - DZ - state.E) / denom
        history.append(float(residual))
        if residual < config.tol:
            converged = True
            break

    return SeparationSolution(
        Z=state.Z,
        E=state.E,
        A=DZ,
        residual_history=history,
        iters=state.iteration,
        converged=converged,
        wall_time=time.perf_counter() - start,
    )
