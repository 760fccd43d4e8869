"""Synthetic problem instances with known ground truth, plus a timing harness.

Three generator families:

* matrix instances (a non-negative dictionary, row-sparse activations, and
  sparse corruption) for recovery tests;
* the little chord fixture whose activation matrix has exactly three
  nonzero rows (C, F, G over a C-G-F-G-C progression);
* an audio fixture: synthetic accompaniment, a gliding vocal line with its
  exact pitch contour, and their 0 dB mixture, for end-to-end pipeline
  checks without any licensed dataset.

The timing harness runs a fixed iteration count single-threaded so that
per-iteration costs can be compared across methods and problem sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from threadpoolctl import threadpool_limits

from .annotation import PitchContour
from .dsp import AudioClip
from .solvers import INFORMED_METHODS, DICTIONARY_METHODS, ProblemSpec, default_config, solve

__all__ = [
    "SynthInstance",
    "TimingRow",
    "AudioFixture",
    "gen_group_sparse",
    "gen_chord_fixture",
    "run_scaling",
    "gen_audio_fixture",
    "CHORD_NAMES",
]

FIXTURE_RATE_HZ = 22050.0

# Triad pitch classes on the C major scale, one chord per scale degree.
_NOTE_HZ = {
    "C4": 261.63, "D4": 293.66, "E4": 329.63, "F4": 349.23,
    "G4": 392.00, "A4": 440.00, "B4": 493.88,
    "C5": 523.25, "D5": 587.33, "E5": 659.26, "F5": 698.46,
}
CHORD_NAMES = ("C", "Dm", "Em", "F", "G", "Am", "Bdim")
_CHORD_NOTES = {
    "C": ("C4", "E4", "G4"),
    "Dm": ("D4", "F4", "A4"),
    "Em": ("E4", "G4", "B4"),
    "F": ("F4", "A4", "C5"),
    "G": ("G4", "B4", "D5"),
    "Am": ("A4", "C5", "E5"),
    "Bdim": ("B4", "D5", "F5"),
}
_PROGRESSION = ("C", "G", "F", "G", "C")


@dataclass(frozen=True)
class SynthInstance:
    """X = D @ Z_true + E_true exactly; Z_true is nonzero only on active_rows."""

    X: np.ndarray
    D: np.ndarray
    Z_true: np.ndarray
    E_true: np.ndarray
    active_rows: tuple
    seed: int


def gen_group_sparse(m, n, k, active, e_density, snr_db, seed):
    """Random instance: sparse non-negative atoms, a few dense activation
    rows, and sparse non-negative corruption scaled to the requested
    accompaniment-to-corruption Frobenius ratio (in dB)."""
    if min(m, n, k) < 1:
        raise ValueError("m, n, k must be at least 1")
    if not 0 <= active <= k:
        raise ValueError(f"active must lie in [0, {k}]")
    if not 0.0 <= e_density <= 1.0:
        raise ValueError("e_density must lie in [0, 1]")
    rng = np.random.default_rng(seed)

    # Sparse supports keep the atoms incoherent.
    nnz_atom = max(2, int(np.ceil(0.15 * m)))
    D = np.zeros((m, k))
    for j in range(k):
        rows = rng.choice(m, size=min(nnz_atom, m), replace=False)
        D[rows, j] = rng.uniform(0.2, 1.0, size=rows.size)
    D /= np.linalg.norm(D, axis=0)

    Z = np.zeros((k, n))
    rows = tuple(int(r) for r in sorted(rng.choice(k, size=active, replace=False))) if active else ()
    if rows:
        Z[list(rows)] = rng.uniform(0.5, 1.5, size=(active, n))

    E = np.zeros((m, n))
    nnz_e = int(round(e_density * m * n))
    if nnz_e:
        flat = rng.choice(m * n, size=nnz_e, replace=False)
        E.flat[flat] = rng.uniform(0.5, 1.5, size=nnz_e)
        accomp_norm = np.linalg.norm(D @ Z)
        if accomp_norm > 0:
            E *= accomp_norm * 10.0 ** (-snr_db / 20.0) / np.linalg.norm(E)

    return SynthInstance(
        X=D @ Z + E, D=D, Z_true=Z, E_true=E, active_rows=rows, seed=int(seed)
    )


def _chord_atom_bank(num_bins, bin_hz, harmonics=5):
    """Unit-norm magnitude-spectrum templates, one per triad."""
    bank = np.zeros((num_bins, len(CHORD_NAMES)))
    centers = np.arange(num_bins) * bin_hz
    for j, name in enumerate(CHORD_NAMES):
        atom = np.zeros(num_bins)
        for note in _CHORD_NOTES[name]:
            for h in range(1, harmonics + 1):
                freq = h * _NOTE_HZ[note]
                if freq >= centers[-1]:
                    break
                atom += (1.0 / h) * np.exp(-0.5 * ((centers - freq) / (1.2 * bin_hz)) ** 2)
        bank[:, j] = atom / np.linalg.norm(atom)
    return bank


def gen_chord_fixture():
    """The C-G-F-G-C toy: 7 chord atoms and the indicator activations.

    Z_true is the 7x5 matrix with ones marking which chord sounds in which
    time slot; only the C, F, and G rows (indices 0, 3, 4) are nonzero.
    """
    bin_hz = FIXTURE_RATE_HZ / 1411.0
    D = _chord_atom_bank(num_bins=240, bin_hz=bin_hz)
    Z = np.zeros((7, 5))
    for col, chord in enumerate(_PROGRESSION):
        Z[CHORD_NAMES.index(chord), col] = 1.0
    return SynthInstance(
        X=D @ Z,
        D=D,
        Z_true=Z,
        E_true=np.zeros((240, 5)),
        active_rows=(0, 3, 4),
        seed=0,
    )


@dataclass(frozen=True)
class TimingRow:
    n: int
    method: str
    seconds_per_iter: float
    total_seconds: float
    iters: int


def run_scaling(method, m, k, n_values, seed, iters=50):
    """Per-iteration wall time at each frame count, single-threaded.

    Runs exactly ``iters`` iterations (the convergence test is disabled by
    setting an unreachable tolerance) so methods and sizes see identical
    iteration counts.
    """
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly increasing")
    rows = []
    for n in n_values:
        inst = gen_group_sparse(
            m, n, k, active=max(1, k // 5), e_density=0.02, snr_db=0.0, seed=seed
        )
        informed = method in INFORMED_METHODS
        spec = ProblemSpec(
            X=inst.X,
            method=method,
            D=inst.D if method in DICTIONARY_METHODS else None,
            E0=inst.E_true if informed else None,
        )
        # Unreachable tolerance disables the convergence check.
        config = replace(
            default_config(inst.X.shape[0], n, method), tol=1e-300, max_iters=iters
        )
        with threadpool_limits(limits=1):
            result = solve(spec, config)
        rows.append(
            TimingRow(
                n=n,
                method=method,
                seconds_per_iter=result.wall_time / result.iters,
                total_seconds=result.wall_time,
                iters=result.iters,
            )
        )
    return rows


class AudioFixture(NamedTuple):
    mixture: AudioClip
    voice: AudioClip
    music: AudioClip
    contour: PitchContour


def _ramp_envelope(n, ramp):
    env = np.ones(n)
    r = min(ramp, n // 2)
    if r > 0:
        fade = 0.5 - 0.5 * np.cos(np.pi * np.arange(r) / r)
        env[:r] = fade
        env[-r:] = fade[::-1]
    return env


def _render_music(t, rng, sr):
    """Chord progression with tremolo plus a percussion layer.

    The percussion (kick thumps and noise hits on eighth notes) is the
    classic poison for purely sparsity/low-rank based separation: it is
    broadband and transient, so the sparse term wants to absorb it."""
    n = t.size
    chords = np.zeros(n)
    chord_len = int(round(1.0 * sr))
    ramp = int(round(0.025 * sr))
    pos = 0
    slot = 0
    while pos < n:
        chord = _PROGRESSION[slot % len(_PROGRESSION)]
        length = min(chord_len, n - pos)
        seg_t = t[pos:pos + length]
        seg = np.zeros(length)
        for note in _CHORD_NOTES[chord]:
            base = _NOTE_HZ[note]
            for h in range(1, 9):
                freq = h * base
                if freq >= sr / 2:
                    break
                seg += (0.5 / h) * np.sin(2 * np.pi * freq * seg_t + rng.uniform(0, 2 * np.pi))
        tremolo = 1.0 + 0.1 * np.sin(2 * np.pi * 2.5 * seg_t + rng.uniform(0, 2 * np.pi))
        chords[pos:pos + length] += seg * tremolo * _ramp_envelope(length, ramp)
        pos += length
        slot += 1

    drums = np.zeros(n)
    eighth = int(round(0.25 * sr))
    for beat, pos in enumerate(range(0, n, eighth)):
        velocity = rng.uniform(0.5, 1.3)
        if rng.random() < 0.15:  # dropped hits keep the pattern aperiodic
            continue
        if beat % 2 == 0:  # kick: decaying low thump
            length = min(int(0.12 * sr), n - pos)
            tau = 0.03 * sr
            env = np.exp(-np.arange(length) / tau)
            freq = 90.0 * np.exp(-np.arange(length) / (0.5 * tau))
            drums[pos:pos + length] += velocity * env * np.sin(
                2 * np.pi * np.cumsum(freq) / sr
            )
        else:  # hat: short broadband noise hit
            length = min(int(0.05 * sr), n - pos)
            env = np.exp(-np.arange(length) / (0.008 * sr))
            drums[pos:pos + length] += 0.5 * velocity * env * rng.standard_normal(length)

    lead = _render_lead(n, rng, sr)
    return chords + drums + lead


# C major scale degrees for the lead line, two octaves above the voice.
_LEAD_SCALE_HZ = (523.25, 587.33, 659.26, 698.46, 783.99, 880.00, 987.77,
                  1046.5, 1174.7, 1318.5)


def _render_lead(n, rng, sr):
    """Plucky monophonic instrumental line.

    Transient, harmonic, and melodically wandering: exactly the material a
    plain sparsity prior mistakes for voice, while a pitch-informed mask
    (tuned to the singer's f0) excludes it."""
    lead = np.zeros(n)
    note_len = int(round(0.2 * sr))
    degree = rng.integers(0, len(_LEAD_SCALE_HZ))
    for pos in range(0, n, note_len):
        degree = int(np.clip(degree + rng.integers(-2, 3), 0, len(_LEAD_SCALE_HZ) - 1))
        if rng.random() < 0.15:
            continue
        freq = _LEAD_SCALE_HZ[degree]
        length = min(note_len, n - pos)
        seg_t = np.arange(length) / sr
        env = np.exp(-seg_t / 0.18)
        note = np.zeros(length)
        for h in range(1, 5):
            if h * freq >= sr / 2:
                break
            note += (1.4 / h) * np.sin(2 * np.pi * h * freq * seg_t + rng.uniform(0, 2 * np.pi))
        lead[pos:pos + length] += env * note
    return lead


def _voice_f0_trajectory(t, duration):
    """Octave glide 220 -> 440 Hz with vibrato, gated by phrase rests."""
    glide = 220.0 * 2.0 ** (t / duration)
    vibrato = 1.0 + 0.03 * np.sin(2 * np.pi * 5.0 * t)
    f0 = glide * vibrato
    phrase = (t % 2.4) < 1.8  # 1.8 s singing, 0.6 s rest
    return np.where(phrase, f0, 0.0)


def _render_voice(f0, sr):
    """Harmonic tone following the instantaneous f0 (0 = silence)."""
    voiced = f0 > 0
    phase = 2 * np.pi * np.cumsum(f0) / sr
    voice = np.zeros(f0.size)
    for h in range(1, 9):
        voice += (0.6 / np.sqrt(h)) * np.sin(h * phase)
    gate = voiced.astype(np.float64)
    ramp = int(0.03 * sr)
    if ramp > 1:
        kernel = np.hanning(2 * ramp + 1)
        gate = np.convolve(gate, kernel / kernel.sum(), mode="same")
    return voice * gate


def gen_audio_fixture(duration_sec, seed):
    """Self-contained audio test scene at 22050 Hz.

    The returned contour samples the exact synthesized f0 trajectory every
    10 ms (0 where the voice rests), and voice + music = mixture holds
    samplewise.
    """
    if duration_sec < 2.0:
        raise ValueError("duration_sec must be at least 2 seconds")
    rng = np.random.default_rng(seed)
    sr = FIXTURE_RATE_HZ
    n = int(round(duration_sec * sr))
    t = np.arange(n) / sr

    music = _render_music(t, rng, sr)
    f0 = _voice_f0_trajectory(t, float(duration_sec))
    voice = _render_voice(f0, sr)

    # 0 dB mix: equal RMS, then keep the mixture comfortably inside [-1, 1].
    voice *= np.sqrt(np.mean(music**2) / np.mean(voice**2))
    mixture = voice + music
    scale = 0.9 / np.abs(mixture).max()
    voice *= scale
    music *= scale
    mixture = voice + music

    step = int(round(0.01 * sr))
    idx = np.arange(0, n, step)
    contour = PitchContour(times=idx / sr, f0=f0[idx])
    return AudioFixture(
        mixture=AudioClip(mixture, sr),
        voice=AudioClip(voice, sr),
        music=AudioClip(music, sr),
        contour=contour,
    )
