"""Pitch contours, the harmonic mask, and the annotation matrix."""

import numpy as np
import pytest

from gsrsep import AudioClip, PitchContour, annotation_matrix, harmonic_mask, stft


def flat_contour(f0, duration=3.0, step=0.03125):
    times = np.arange(0.0, duration + step, step)
    return PitchContour(times=times, f0=np.full(times.size, f0))


@pytest.fixture(scope="module")
def spec():
    return stft(AudioClip(np.zeros(3 * 22050), 22050.0))


# ---------------------------------------------------------------------------
# contour type

def test_contour_validation():
    with pytest.raises(ValueError):
        PitchContour(times=np.array([0.0, 0.0]), f0=np.array([100.0, 100.0]))
    with pytest.raises(ValueError):
        PitchContour(times=np.array([0.0, 1.0]), f0=np.array([100.0, 30.0]))  # < 40 Hz
    with pytest.raises(ValueError):
        PitchContour(times=np.array([0.0]), f0=np.array([2500.0]))
    with pytest.raises(ValueError):
        PitchContour(times=np.array([]), f0=np.array([]))
    c = PitchContour(times=np.array([0.0, 0.032]), f0=np.array([220.0, 0.0]))
    assert len(c) == 2


def test_contour_nearest_lookup():
    c = PitchContour(times=np.array([0.0, 0.1, 0.2]), f0=np.array([100.0, 200.0, 0.0]))
    assert c.f0_at([0.04])[0] == 100.0
    assert c.f0_at([0.06])[0] == 200.0
    assert c.f0_at([0.19])[0] == 0.0
    assert c.f0_at([0.5])[0] == 0.0  # outside coverage -> unvoiced


# ---------------------------------------------------------------------------
# harmonic mask

def test_mask_hand_calculated_bins(spec):
    # 220 Hz fundamental, 80 Hz width, 22050/1411 bin grid
    mask = harmonic_mask(flat_contour(220.0), spec, w_hz=80.0)
    bin_hz = 22050.0 / 1411.0
    col = mask[:, spec.num_frames // 2]
    assert col[14] == 1.0  # center ~218.8 Hz, inside (180, 260)
    assert col[21] == 0.0  # center ~328.2 Hz, between harmonics
    centers = np.arange(706) * bin_hz
    order = np.maximum(np.round(centers / 220.0), 1.0)
    want = (np.abs(centers - order * 220.0) < 40.0).astype(float)
    assert np.array_equal(col, want)


def test_mask_unvoiced_frames_are_zero_columns(spec):
    times = np.arange(0.0, 3.1, 0.01)
    f0 = np.where(times < 1.5, 220.0, 0.0)
    mask = harmonic_mask(PitchContour(times=times, f0=f0), spec, w_hz=80.0)
    frame_times = spec.frame_times()
    unvoiced = frame_times >= 1.5 + 0.005
    assert np.all(mask[:, unvoiced] == 0.0)
    voiced = frame_times < 1.5 - 0.005
    assert np.all(mask[:, voiced].sum(axis=0) > 0)


def test_mask_width_monotonicity(spec):
    contour = flat_contour(261.0)
    narrow = harmonic_mask(contour, spec, w_hz=60.0)
    wide = harmonic_mask(contour, spec, w_hz=80.0)
    assert np.all(wide[narrow == 1.0] == 1.0)


def test_mask_support_bound(spec):
    f0, w = 220.0, 80.0
    mask = harmonic_mask(flat_contour(f0), spec, w_hz=w)
    bin_hz = 22050.0 / 1411.0
    bound = np.ceil((22050.0 / 2) / f0) * np.ceil(w / bin_hz)
    assert mask.sum(axis=0).max() <= bound


def test_mask_warns_when_contour_short(spec):
    times = np.arange(0.0, 1.0, 0.01)
    contour = PitchContour(times=times, f0=np.full(times.size, 220.0))
    with pytest.warns(UserWarning, match="does not cover"):
        mask = harmonic_mask(contour, spec, w_hz=80.0)
    late = spec.frame_times() > 1.0
    assert np.all(mask[:, late] == 0.0)


def test_mask_rejects_bad_width(spec):
    with pytest.raises(ValueError):
        harmonic_mask(flat_contour(220.0), spec, w_hz=0.0)


# ---------------------------------------------------------------------------
# annotation matrix

def test_annotation_matrix_all_ones_and_zeros():
    rng = np.random.default_rng(0)
    X = np.abs(rng.standard_normal((7, 9)))
    assert np.array_equal(annotation_matrix(X, np.ones_like(X)), X)
    assert np.array_equal(annotation_matrix(X, np.zeros_like(X)), np.zeros_like(X))


def test_annotation_matrix_matches_direct_loop():
    rng = np.random.default_rng(1)
    X = np.abs(rng.standard_normal((6, 5)))
    M = (rng.random((6, 5)) < 0.4).astype(float)
    out = annotation_matrix(X, M)
    for i in range(6):
        for j in range(5):
            assert out[i, j] == X[i, j] * M[i, j]
    assert np.all(out <= X)
    assert np.all(out[M == 0.0] == 0.0)


def test_annotation_matrix_rejects_bad_inputs():
    X = np.ones((3, 3))
    with pytest.raises(ValueError):
        annotation_matrix(X, np.ones((3, 4)))
    with pytest.raises(ValueError):
        annotation_matrix(X, np.full((3, 3), 0.5))
