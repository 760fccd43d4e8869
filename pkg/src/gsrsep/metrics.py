"""Separation quality metrics: SDR, SIR, SAR, and normalized SDR.

An estimate is split into a target part (projection onto the reference),
an interference part (what the remaining true sources explain), and an
artifact remainder.  Energy ratios between those parts give the metrics in
dB.  Projections use a single time-invariant gain per source, so the three
parts always sum to the estimate exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInputError

__all__ = [
    "DB_CAP",
    "Decomposition",
    "MetricReport",
    "decompose",
    "sdr_sir_sar",
    "nsdr",
    "evaluate_separation",
]

DB_CAP = 200.0


class Decomposition(NamedTuple):
    s_target: np.ndarray
    e_interf: np.ndarray
    e_artif: np.ndarray


class EnergyRatios(NamedTuple):
    sdr: float
    sir: float
    sar: float


def _aligned_samples(clips):
    arrays = []
    length = clips[0].samples.size
    rate = clips[0].sample_rate_hz
    for clip in clips:
        if clip.samples.size != length:
            raise ValueError(
                f"clip lengths differ: {clip.samples.size} vs {length}"
            )
        if clip.sample_rate_hz != rate:
            raise ValueError(
                f"sample rates differ: {clip.sample_rate_hz} vs {rate}"
            )
        arrays.append(clip.samples)
    return arrays


def decompose(estimate, target, others=()):
    """Split an estimate into target, interference, and artifact parts.

    ``s_target`` is the orthogonal projection of the estimate onto the
    target; adding ``others`` to the projection basis separates out what
    the competing sources explain; the remainder is artifact.  The parts
    sum to the estimate exactly.
    """
    clips = [estimate, target, *others]
    est, tgt, *rest = _aligned_samples(clips)
    tgt_energy = float(tgt @ tgt)
    if tgt_energy == 0.0:
        raise DegenerateInputError("target has zero energy")
    s_target = (est @ tgt) / tgt_energy * tgt
    if rest:
        basis = np.column_stack([tgt, *rest])
        coeffs, *_ = np.linalg.lstsq(basis, est, rcond=None)
        projected = basis @ coeffs
    else:
        projected = s_target
    e_interf = projected - s_target
    e_artif = est - projected
    return Decomposition(s_target=s_target, e_interf=e_interf, e_artif=e_artif)


def _db_ratio(num, den):
    if num <= 0.0:
        return -DB_CAP
    if den <= 0.0:
        return DB_CAP
    return float(np.clip(10.0 * np.log10(num / den), -DB_CAP, DB_CAP))


def sdr_sir_sar(parts):
    """Energy ratios of a decomposition, in dB (capped at +/-200)."""
    s_t, e_i, e_a = parts
    target_energy = float(s_t @ s_t)
    return EnergyRatios(
        sdr=_db_ratio(target_energy, float((e_i + e_a) @ (e_i + e_a))),
        sir=_db_ratio(target_energy, float(e_i @ e_i)),
        sar=_db_ratio(float((s_t + e_i) @ (s_t + e_i)), float(e_a @ e_a)),
    )


def nsdr(estimate, reference, mixture, others=()):
    """SDR improvement of the estimate over using the raw mixture."""
    sdr_est = sdr_sir_sar(decompose(estimate, reference, others)).sdr
    sdr_mix = sdr_sir_sar(decompose(mixture, reference, others)).sdr
    return sdr_est - sdr_mix


@dataclass(frozen=True)
class MetricReport:
    sdr_db: float
    sir_db: float
    sar_db: float
    nsdr_db: float


def evaluate_separation(estimate, reference, mixture, others=()):
    """Full metric report for one estimated source."""
    ratios = sdr_sir_sar(decompose(estimate, reference, others))
    return MetricReport(
        sdr_db=ratios.sdr,
        sir_db=ratios.sir,
        sar_db=ratios.sar,
        nsdr_db=nsdr(estimate, reference, mixture, others),
    )
