"""Non-negative sparse coding: dictionary training and group bookkeeping.

Training solves

    min_{D >= 0, a_i >= 0}  sum_i 0.5*||x_i - D a_i||^2 + lam*||a_i||_1

by batch alternating minimization: exact cyclic coordinate descent on the
activations, then projected gradient steps on the atoms (non-negative,
column norms at most 1).  Both half-steps decrease the objective, so the
per-epoch objective is nonincreasing and training is deterministic for a
fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .prox import as_matrix

__all__ = [
    "Dictionary",
    "NnscConfig",
    "sparse_code",
    "train_dictionary",
    "concat_dictionaries",
    "split_activation",
]

NORM_SLACK = 1e-9


@dataclass
class Dictionary:
    """Non-negative atom matrix (one column per atom) plus framing metadata.

    ``groups``, when set, partitions the atom columns into contiguous
    blocks (e.g. one block per merged source dictionary).
    """

    atoms: np.ndarray
    sample_rate_hz: float
    fft_size: int
    groups: tuple | None = None

    def __post_init__(self):
        self.atoms = as_matrix(self.atoms, "atoms")
        if np.any(self.atoms < 0):
            raise ValueError("dictionary atoms must be non-negative")
        norms = np.linalg.norm(self.atoms, axis=0)
        if np.any(norms > 1.0 + NORM_SLACK):
            raise ValueError("atom columns must have Euclidean norm <= 1")
        if not np.any(norms > 0):
            raise ValueError("dictionary must contain at least one nonzero atom")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        self.fft_size = int(self.fft_size)
        if self.fft_size < 1:
            raise ValueError("fft_size must be at least 1")
        if self.groups is not None:
            self.groups = tuple(int(g) for g in self.groups)
            if any(g < 1 for g in self.groups):
                raise ValueError("group block sizes must be positive")
            if sum(self.groups) != self.num_atoms:
                raise ValueError(
                    f"group sizes {self.groups} must sum to the atom count "
                    f"{self.num_atoms}"
                )

    @property
    def num_bins(self):
        return self.atoms.shape[0]

    @property
    def num_atoms(self):
        return self.atoms.shape[1]


@dataclass(frozen=True)
class NnscConfig:
    """Training hyperparameters.  ``lambda_dict=None`` means 1/sqrt(m)."""

    num_atoms: int
    lambda_dict: float | None = None
    max_epochs: int = 30
    code_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.num_atoms < 1:
            raise ValueError("num_atoms must be at least 1")
        if self.lambda_dict is not None and self.lambda_dict <= 0:
            raise ValueError("lambda_dict must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.code_iters < 1:
            raise ValueError("code_iters must be at least 1")


def _code_columns(X, W, lam, iters, warm=None):
    """Non-negative lasso codes for every column of X against atoms W.

    Exact cyclic coordinate descent; each coordinate update is the closed
    form non-negative soft threshold, so the objective never increases.
    """
    k = W.shape[1]
    n = X.shape[1]
    A = np.zeros((k, n)) if warm is None else warm.copy()
    R = X - W @ A
    sq = np.einsum("ij,ij->j", W, W)
    for _ in range(iters):
        biggest = 0.0
        for j in range(k):
            if sq[j] <= 0:
                continue
            a_old = A[j]
            v = W[:, j] @ R + sq[j] * a_old
            a_new = np.maximum(0.0, (v - lam) / sq[j])
            step = a_new - a_old
            biggest = max(biggest, float(np.abs(step).max(initial=0.0)))
            if np.any(step != 0):
                R -= np.outer(W[:, j], step)
                A[j] = a_new
        if biggest < 1e-12:
            break
    return A


def sparse_code(x, dictionary, lam=None, iters=200):
    """Code a single non-negative vector in a dictionary.

    Returns the non-negative activation vector minimizing
    ``0.5*||x - D a||^2 + lam*||a||_1`` over ``a >= 0``.
    ``lam=None`` uses 1/sqrt(m).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"x must be a vector, got ndim={x.ndim}")
    if not np.isfinite(x).all():
        raise ValueError("x contains NaN or Inf entries")
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    W = dictionary.atoms if isinstance(dictionary, Dictionary) else as_matrix(dictionary, "D")
    if x.shape[0] != W.shape[0]:
        raise ValueError(
            f"x has length {x.shape[0]} but dictionary atoms have {W.shape[0]} rows"
        )
    if lam is None:
        lam = 1.0 / np.sqrt(W.shape[0])
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    return _code_columns(x[:, None], W, float(lam), int(iters))[:, 0]


def nnsc_objective(X, W, A, lam):
    """Total NNSC objective 0.5*||X - W A||_F^2 + lam*sum(A)."""
    return 0.5 * float(np.linalg.norm(X - W @ A) ** 2) + lam * float(A.sum())


def _farthest_frame_init(X, col_norms, k, rng):
    """Seed atoms from mutually dissimilar frames (farthest-point picking).

    Spread-out starting atoms avoid the local minima that random frame
    picks hit when several picks land on near-collinear frames.  The walk
    starts at a seeded random nonzero frame, so different seeds explore
    different (still deterministic) initializations.
    """
    m = X.shape[0]
    candidates = np.flatnonzero(col_norms > 0)
    unit = X[:, candidates] / col_norms[candidates]
    first = rng.integers(0, candidates.size)
    picked = [first]
    max_cos = unit.T @ unit[:, first]
    while len(picked) < min(k, candidates.size):
        nxt = int(np.argmin(max_cos))
        picked.append(nxt)
        max_cos = np.maximum(max_cos, unit.T @ unit[:, nxt])
    W = unit[:, picked]
    if W.shape[1] < k:
        extra = rng.random((m, k - W.shape[1]))
        extra /= np.linalg.norm(extra, axis=0)
        W = np.hstack([W, extra])
    return W


def _project_atoms(W):
    """Project columns onto {w >= 0, ||w||_2 <= 1} (clip, then shrink to the ball)."""
    W = np.maximum(W, 0.0)
    norms = np.linalg.norm(W, axis=0)
    over = norms > 1.0
    if np.any(over):
        W[:, over] /= norms[over]
    return W


def _update_atoms(X, W, A, steps=5):
    """Monotone projected gradient on the atoms for fixed codes."""
    AAt = A @ A.T
    lipschitz = float(np.linalg.norm(AAt, 2))
    if lipschitz <= 0:
        return W
    XAt = X @ A.T
    step = 1.0 / lipschitz
    for _ in range(steps):
        W = _project_atoms(W - step * (W @ AAt - XAt))
    return W


def train_dictionary(frames, config, sample_rate_hz=22050.0, fft_size=1411,
                     return_objectives=False):
    """Learn a non-negative dictionary from magnitude-spectrum frames.

    Parameters
    ----------
    frames : array, m x n
        Non-negative training columns; n must be at least num_atoms.
    config : NnscConfig
    sample_rate_hz, fft_size :
        Framing metadata stored on the resulting :class:`Dictionary`.
    return_objectives : bool
        Also return the per-epoch objective values (nonincreasing).

    Atoms unused for a full epoch are re-seeded from the currently
    worst-reconstructed frame, which leaves the objective unchanged.
    """
    X = as_matrix(frames, "frames")
    if np.any(X < 0):
        raise ValueError("frames must be non-negative")
    m, n = X.shape
    k = config.num_atoms
    if n < k:
        raise ValueError(f"need at least num_atoms={k} frames, got {n}")
    col_norms = np.linalg.norm(X, axis=0)
    if not np.any(col_norms > 0):
        raise DegenerateInputError("all training frames are zero")
    lam = config.lambda_dict if config.lambda_dict is not None else 1.0 / np.sqrt(m)

    rng = np.random.default_rng(config.seed)
    W = _farthest_frame_init(X, col_norms, k, rng)

    A = None
    objectives = []
    for epoch in range(config.max_epochs):
        A = _code_columns(X, W, lam, config.code_iters, warm=A)
        W = _update_atoms(X, W, A)
        objectives.append(nnsc_objective(X, W, A, lam))
        if epoch == config.max_epochs - 1:
            break
        # Unused atoms contribute nothing, so re-seeding them from the worst
        # reconstructed frames leaves the objective untouched.
        dead = np.flatnonzero(~np.any(A > 0, axis=1))
        if dead.size:
            residual = np.linalg.norm(X - W @ A, axis=0)
            worst_first = np.argsort(-residual)
            for atom_idx, frame_idx in zip(dead, worst_first):
                if col_norms[frame_idx] > 0:
                    W[:, atom_idx] = X[:, frame_idx] / col_norms[frame_idx]

    trained = Dictionary(atoms=W, sample_rate_hz=sample_rate_hz, fft_size=fft_size)
    if return_objectives:
        return trained, objectives
    return trained


def concat_dictionaries(dicts):
    """Concatenate dictionaries column-wise; each input becomes one group block."""
    dicts = list(dicts)
    if not dicts:
        raise ValueError("need at least one dictionary")
    first = dicts[0]
    for d in dicts[1:]:
        if d.num_bins != first.num_bins:
            raise ValueError(
                f"dictionaries disagree on bins: {d.num_bins} vs {first.num_bins}"
            )
        if d.sample_rate_hz != first.sample_rate_hz or d.fft_size != first.fft_size:
            raise ValueError("dictionaries disagree on framing metadata")
    atoms = np.hstack([d.atoms for d in dicts])
    groups = tuple(d.num_atoms for d in dicts)
    return Dictionary(
        atoms=atoms,
        sample_rate_hz=first.sample_rate_hz,
        fft_size=first.fft_size,
        groups=groups,
    )


def split_activation(Z, groups):
    """Split activation rows into the per-dictionary blocks.

    Stacking the blocks back vertically reproduces Z, so the dictionary
    product decomposes as the sum of per-block products.
    """
    Z = as_matrix(Z, "Z")
    groups = tuple(int(g) for g in groups)
    if any(g < 1 for g in groups):
        raise ValueError("group block sizes must be positive")
    if sum(groups) != Z.shape[0]:
        raise ValueError(
            f"group sizes {groups} must sum to the activation row count {Z.shape[0]}"
        )
    bounds = np.cumsum(groups)[:-1]
    return [block.copy() for block in np.split(Z, bounds, axis=0)]
