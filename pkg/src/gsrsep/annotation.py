"""Vocal pitch contours and the binary harmonic mask built from them.

A frame whose fundamental is F0 passes exactly the bins whose center
frequency lies within w/2 of some positive integer multiple of F0;
unvoiced frames (F0 = 0) pass nothing.  Multiplying the mask into the
mixture magnitude yields the vocal annotation matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .prox import as_matrix

__all__ = ["PitchContour", "harmonic_mask", "annotation_matrix"]

F0_MIN_HZ = 40.0
F0_MAX_HZ = 2000.0
DEFAULT_MASK_WIDTH_HZ = 80.0


@dataclass
class PitchContour:
    """Time-stamped fundamental frequencies; f0 = 0 marks unvoiced spots."""

    times: np.ndarray
    f0: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.f0 = np.asarray(self.f0, dtype=np.float64)
        if self.times.ndim != 1 or self.f0.ndim != 1:
            raise ValueError("times and f0 must be 1-D")
        if self.times.size == 0:
            raise ValueError("contour must contain at least one entry")
        if self.times.size != self.f0.size:
            raise ValueError(
                f"times ({self.times.size}) and f0 ({self.f0.size}) differ in length"
            )
        if not (np.isfinite(self.times).all() and np.isfinite(self.f0).all()):
            raise ValueError("contour contains NaN or Inf")
        if np.any(self.times < 0):
            raise ValueError("times must be non-negative")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        voiced = self.f0 > 0
        bad = voiced & ((self.f0 < F0_MIN_HZ) | (self.f0 > F0_MAX_HZ))
        if np.any(bad):
            raise ValueError(
                f"voiced f0 must lie in [{F0_MIN_HZ}, {F0_MAX_HZ}] Hz; "
                f"got {self.f0[bad][0]}"
            )

    def __len__(self):
        return self.times.size

    def f0_at(self, query_times):
        """Nearest-entry f0 lookup; 0 (unvoiced) outside the covered span."""
        query_times = np.atleast_1d(np.asarray(query_times, dtype=np.float64))
        idx = np.searchsorted(self.times, query_times)
        idx = np.clip(idx, 1, self.times.size - 1) if self.times.size > 1 else np.zeros_like(idx)
        left = np.maximum(idx - 1, 0)
        pick = np.where(
            np.abs(self.times[idx] - query_times) < np.abs(query_times - self.times[left]),
            idx,
            left,
        )
        out = self.f0[pick]
        outside = (query_times < self.times[0]) | (query_times > self.times[-1])
        out[outside] = 0.0
        return out


def harmonic_mask(contour, spec, w_hz=DEFAULT_MASK_WIDTH_HZ):
    """Binary mask passing bins near integer multiples of the vocal F0.

    Parameters
    ----------
    contour : PitchContour
    spec : Spectrogram
        Only the framing metadata (bin grid and frame times) is used.
    w_hz : float
        Full mask width; a bin at center f passes when |f - n*F0| < w_hz/2
        for some harmonic order n >= 1.

    Frames outside the contour's time span are treated as unvoiced (with a
    warning), matching the convention that no annotation means no vocal.
    """
    if w_hz <= 0:
        raise ValueError("w_hz must be positive")
    if not isinstance(contour, PitchContour):
        raise ValueError("contour must be a PitchContour")
    frame_centers = spec.frame_times()
    if frame_centers[-1] > contour.times[-1] or frame_centers[0] < contour.times[0]:
        warnings.warn(
            "pitch contour does not cover the full clip; uncovered frames "
            "are treated as unvoiced",
            stacklevel=2,
        )
    f0 = contour.f0_at(frame_centers)
    num_bins = spec.magnitude.shape[0]
    bin_centers = np.arange(num_bins) * spec.bin_hz

    mask = np.zeros((num_bins, len(frame_centers)))
    voiced = np.flatnonzero(f0 > 0)
    if voiced.size:
        with np.errstate(divide="ignore", invalid="ignore"):
            order = np.round(bin_centers[:, None] / f0[None, voiced])
        order = np.maximum(order, 1.0)
        dist = np.abs(bin_centers[:, None] - order * f0[None, voiced])
        mask[:, voiced] = (dist < w_hz / 2.0).astype(np.float64)
    return mask


def annotation_matrix(X, M):
    """Vocal annotations: the entrywise product of the magnitudes and a
    binary mask."""
    X = as_matrix(X, "X")
    M = as_matrix(M, "M")
    if X.shape != M.shape:
        raise ValueError(f"X {X.shape} and M {M.shape} must share a shape")
    if not np.all((M == 0.0) | (M == 1.0)):
        raise ValueError("mask must be binary (entries exactly 0 or 1)")
    return X * M
