"""Proximal operators and matrix norms used by the separation solvers.

All functions are pure: inputs are validated, never mutated, and a fresh
array is returned.  Matrices are real, dense, and non-empty; see
:func:`as_matrix`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NumericalError

__all__ = [
    "as_matrix",
    "soft_threshold",
    "soft_threshold_rows",
    "singular_value_threshold",
    "matrix_norms",
    "MatrixNorms",
]


def as_matrix(a, name="matrix"):
    """Validate and return `a` as a 2-D float64 array.

    Raises ValueError unless `a` is two-dimensional with at least one row
    and one column and all entries finite.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def _check_tau(tau):
    tau = float(tau)
    if tau < 0 or not np.isfinite(tau):
        raise ValueError(f"threshold must be a finite non-negative real, got {tau}")
    return tau


def soft_threshold(M, tau):
    """Elementwise soft threshold: sign(M) * max(|M| - tau, 0).

    Minimizes ``tau*||B||_1 + 0.5*||B - M||_F^2`` over B.
    """
    M = as_matrix(M, "M")
    tau = _check_tau(tau)
    return np.sign(M) * np.maximum(np.abs(M) - tau, 0.0)


def soft_threshold_rows(M, tau):
    """Groupwise (row-wise) soft threshold.

    Row i of the result is ``(1 - tau/||M_i||)_+ * M_i``;  rows with norm
    at most tau collapse to zero, and all-zero rows stay zero.  Minimizes
    ``tau*||B^T||_{2,1} + 0.5*||B - M||_F^2`` over B, where the (2,1)-norm
    sums the Euclidean norms of the rows.
    """
    M = as_matrix(M, "M")
    tau = _check_tau(tau)
    row_norms = np.linalg.norm(M, axis=1)
    scale = np.zeros_like(row_norms)
    nz = row_norms > 0
    scale[nz] = np.maximum(1.0 - tau / row_norms[nz], 0.0)
    return M * scale[:, None]


def singular_value_threshold(M, tau):
    """Soft threshold the singular values of M.

    With M = U diag(s) V^T (thin SVD), returns U diag(max(s - tau, 0)) V^T,
    the minimizer of ``tau*||B||_* + 0.5*||B - M||_F^2``.
    """
    M = as_matrix(M, "M")
    tau = _check_tau(tau)
    u, s, vt = _svd(M)
    s = np.maximum(s - tau, 0.0)
    return (u * s) @ vt


def _svd(M):
    """Thin SVD with a divide-and-conquer -> QR-iteration fallback."""
    try:
        return np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(M, full_matrices=False, lapack_driver="gesvd")
    except Exception as exc:
        raise NumericalError(
            f"SVD failed to converge for {M.shape[0]}x{M.shape[1]} matrix "
            f"(fro norm {np.linalg.norm(M):.3e}) under both gesdd and gesvd"
        ) from exc


class MatrixNorms(NamedTuple):
    l1: float
    fro: float
    l21_rows: float
    trace: float


def matrix_norms(M):
    """Return (l1, fro, l21_rows, trace) norms of M.

    `l21_rows` is the sum of Euclidean norms of the rows; `trace` is the
    nuclear norm (sum of singular values).
    """
    M = as_matrix(M, "M")
    return MatrixNorms(
        l1=float(np.abs(M).sum()),
        fro=float(np.linalg.norm(M)),
        l21_rows=float(np.linalg.norm(M, axis=1).sum()),
        trace=float(np.linalg.svd(M, compute_uv=False).sum()),
    )
