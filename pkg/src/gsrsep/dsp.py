"""Time-frequency front and back end.

The analysis chain is: downsample 2:1, then a short-time Fourier transform
with a 1411-point periodic Hann window at 75% overlap (hop 353, no zero
padding).  Synthesis overlap-adds the windowed inverse frames and divides
by the accumulated squared window (least-squares inversion), so a round
trip is exact away from the first and last half window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.signal

from .prox import as_matrix

__all__ = [
    "AudioClip",
    "Spectrogram",
    "resample_half",
    "stft",
    "istft",
    "reconstruct_sources",
    "SeparatedSources",
]

DEFAULT_WINDOW_LEN = 1411
DEFAULT_OVERLAP = 0.75


@dataclass
class AudioClip:
    """Mono audio: a finite, non-empty sample sequence and its rate."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got ndim={self.samples.ndim}")
        if self.samples.size == 0:
            raise ValueError("clip must contain at least one sample")
        if not np.isfinite(self.samples).all():
            raise ValueError("samples contain NaN or Inf")
        self.sample_rate_hz = float(self.sample_rate_hz)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_sec(self):
        return self.samples.size / self.sample_rate_hz


@dataclass
class Spectrogram:
    """One-sided magnitude/phase pair plus the framing that produced it."""

    magnitude: np.ndarray
    phase: np.ndarray
    window_len: int
    hop: int
    fft_size: int
    sample_rate_hz: float
    num_samples: int

    def __post_init__(self):
        self.magnitude = as_matrix(self.magnitude, "magnitude")
        self.phase = as_matrix(self.phase, "phase")
        if self.magnitude.shape != self.phase.shape:
            raise ValueError(
                f"magnitude {self.magnitude.shape} and phase {self.phase.shape} "
                "must share a shape"
            )
        if np.any(self.magnitude < 0):
            raise ValueError("magnitude entries must be non-negative")
        self.window_len = int(self.window_len)
        self.hop = int(self.hop)
        self.fft_size = int(self.fft_size)
        self.num_samples = int(self.num_samples)
        if self.window_len < 2:
            raise ValueError("window_len must be at least 2")
        if not 1 <= self.hop <= self.window_len:
            raise ValueError("hop must be in [1, window_len]")
        if self.fft_size < self.window_len:
            raise ValueError("fft_size must be at least window_len")
        expected_bins = self.fft_size // 2 + 1
        if self.magnitude.shape[0] != expected_bins:
            raise ValueError(
                f"one-sided spectrum needs fft_size//2+1={expected_bins} bins, "
                f"got {self.magnitude.shape[0]}"
            )
        if self.num_samples < self.window_len:
            raise ValueError("num_samples must cover at least one window")
        self.sample_rate_hz = float(self.sample_rate_hz)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def num_frames(self):
        return self.magnitude.shape[1]

    @property
    def bin_hz(self):
        return self.sample_rate_hz / self.fft_size

    def frame_times(self):
        """Center time (seconds) of each analysis frame."""
        starts = np.arange(self.num_frames) * self.hop
        return (starts + self.window_len / 2.0) / self.sample_rate_hz


def _hann_periodic(n):
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _halfband_fir(num_taps=255):
    """Windowed-sinc low-pass at a quarter of the input rate (the output
    Nyquist), unit DC gain."""
    mid = (num_taps - 1) / 2.0
    t = np.arange(num_taps) - mid
    h = 0.5 * np.sinc(0.5 * t) * np.blackman(num_taps)
    return h / h.sum()


def resample_half(clip, target_rate_hz=None):
    """Halve the sample rate: anti-alias low-pass, then keep every other sample.

    Only the exact 2:1 ratio is supported; passing any other
    ``target_rate_hz`` is an error.
    """
    if target_rate_hz is not None and target_rate_hz != clip.sample_rate_hz / 2.0:
        raise ValueError(
            f"only exact 2:1 resampling is supported: cannot go from "
            f"{clip.sample_rate_hz} Hz to {target_rate_hz} Hz"
        )
    filtered = scipy.signal.fftconvolve(clip.samples, _halfband_fir(), mode="same")
    return AudioClip(samples=filtered[::2], sample_rate_hz=clip.sample_rate_hz / 2.0)


def stft(clip, window_len=DEFAULT_WINDOW_LEN, overlap=DEFAULT_OVERLAP):
    """Short-time Fourier transform with a periodic Hann window.

    hop = round(window_len * (1 - overlap)); fft_size = window_len (no zero
    padding).  Returns the one-sided magnitude and phase.
    """
    window_len = int(window_len)
    if window_len < 2:
        raise ValueError("window_len must be at least 2")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must be in [0, 1)")
    hop = int(round(window_len * (1.0 - overlap)))
    if hop < 1:
        raise ValueError("overlap too large: hop rounds to zero")
    x = clip.samples
    if x.size < window_len:
        raise ValueError(
            f"clip has {x.size} samples but the window needs {window_len}"
        )
    num_frames = 1 + (x.size - window_len) // hop
    window = _hann_periodic(window_len)
    starts = np.arange(num_frames) * hop
    frames = x[starts[:, None] + np.arange(window_len)] * window
    spectrum = np.fft.rfft(frames, n=window_len, axis=1).T
    return Spectrogram(
        magnitude=np.abs(spectrum),
        phase=np.angle(spectrum),
        window_len=window_len,
        hop=hop,
        fft_size=window_len,
        sample_rate_hz=clip.sample_rate_hz,
        num_samples=x.size,
    )


def synthesis_normalizer(spec):
    """Accumulated squared analysis window over the synthesis span.

    This is the denominator of the least-squares overlap-add inverse; it is
    strictly positive everywhere in the frame-covered interior.
    """
    window = _hann_periodic(spec.window_len)
    covered = (spec.num_frames - 1) * spec.hop + spec.window_len
    wsum = np.zeros(covered)
    sq = window * window
    for f in range(spec.num_frames):
        start = f * spec.hop
        wsum[start:start + spec.window_len] += sq
    return wsum


def istft(spec):
    """Inverse STFT by weighted overlap-add with the analysis window.

    Output is trimmed (or zero-padded at the tail) to the sample count
    recorded at analysis time.
    """
    covered = (spec.num_frames - 1) * spec.hop + spec.window_len
    if not covered <= spec.num_samples < covered + spec.hop:
        raise ValueError(
            f"framing metadata inconsistent: {spec.num_frames} frames cover "
            f"{covered} samples but num_samples={spec.num_samples}"
        )
    window = _hann_periodic(spec.window_len)
    complex_spectrum = spec.magnitude * np.exp(1j * spec.phase)
    frames = np.fft.irfft(complex_spectrum.T, n=spec.fft_size, axis=1)
    frames = frames[:, : spec.window_len] * window

    acc = np.zeros(covered)
    for f in range(spec.num_frames):
        start = f * spec.hop
        acc[start:start + spec.window_len] += frames[f]
    wsum = synthesis_normalizer(spec)
    # Floor the normalizer: where window coverage is vanishingly small (the
    # outermost edge samples) exact division would amplify inconsistent
    # spectra without bound, so those samples fade out instead.  Interior
    # samples sit far above the floor and divide exactly.
    floor = 1e-2 * wsum.max()
    out = np.zeros(spec.num_samples)
    out[:covered] = acc / np.maximum(wsum, floor)
    return AudioClip(samples=out, sample_rate_hz=spec.sample_rate_hz)


class SeparatedSources(NamedTuple):
    voice: AudioClip
    music: AudioClip


def reconstruct_sources(solution, spec):
    """Waveforms for both separated parts, using the mixture phase.

    Solver magnitudes can dip below zero; they are clamped at zero before
    synthesis.
    """
    shape = spec.magnitude.shape
    if solution.E.shape != shape or solution.A.shape != shape:
        raise ValueError(
            f"solution shapes E{solution.E.shape}/A{solution.A.shape} do not "
            f"match the spectrogram {shape}"
        )

    def synth(mag):
        return istft(
            Spectrogram(
                magnitude=np.maximum(mag, 0.0),
                phase=spec.phase,
                window_len=spec.window_len,
                hop=spec.hop,
                fft_size=spec.fft_size,
                sample_rate_hz=spec.sample_rate_hz,
                num_samples=spec.num_samples,
            )
        )

    return SeparatedSources(voice=synth(solution.E), music=synth(solution.A))
