"""NNSC coding/training oracles and the group bookkeeping."""

import itertools

import numpy as np
import pytest

from gsrsep import (
    DegenerateInputError,
    Dictionary,
    NnscConfig,
    concat_dictionaries,
    sparse_code,
    split_activation,
    train_dictionary,
)


def nn_lasso_objective(x, W, a, lam):
    return 0.5 * np.linalg.norm(x - W @ a) ** 2 + lam * a.sum()


def nn_lasso_support_enumeration(x, W, lam):
    """Exact minimizer of the non-negative lasso by enumerating supports.

    For each candidate support S the unconstrained stationary point solves
    (W_S^T W_S) a_S = W_S^T x - lam; the candidate is kept only if entirely
    non-negative.  With k small this is exhaustive and independent of any
    iterative scheme.
    """
    k = W.shape[1]
    best_val, best = nn_lasso_objective(x, W, np.zeros(k), lam), np.zeros(k)
    for r in range(1, k + 1):
        for support in itertools.combinations(range(k), r):
            Ws = W[:, support]
            try:
                a_s = np.linalg.solve(Ws.T @ Ws, Ws.T @ x - lam)
            except np.linalg.LinAlgError:
                continue
            if np.any(a_s < 0):
                continue
            a = np.zeros(k)
            a[list(support)] = a_s
            val = nn_lasso_objective(x, W, a, lam)
            if val < best_val:
                best_val, best = val, a
    return best, best_val


def unit_atoms(rng, m, k):
    W = np.abs(rng.standard_normal((m, k)))
    return W / np.linalg.norm(W, axis=0)


# ---------------------------------------------------------------------------
# sparse_code

def test_sparse_code_zero_input():
    rng = np.random.default_rng(0)
    W = unit_atoms(rng, 6, 3)
    assert np.array_equal(sparse_code(np.zeros(6), W, lam=0.3), np.zeros(3))


def test_sparse_code_single_atom_closed_form():
    rng = np.random.default_rng(1)
    d = np.abs(rng.standard_normal(8))
    d /= np.linalg.norm(d)
    c, lam = 2.5, 0.4
    a = sparse_code(c * d, d[:, None], lam=lam, iters=500)
    assert a[0] == pytest.approx(c - lam, abs=1e-10)


def test_sparse_code_matches_support_enumeration():
    rng = np.random.default_rng(2)
    for _ in range(20):
        W = unit_atoms(rng, 8, 3)
        x = np.abs(rng.standard_normal(8))
        lam = rng.uniform(0.05, 0.5)
        a = sparse_code(x, W, lam=lam, iters=2000)
        _, best_val = nn_lasso_support_enumeration(x, W, lam)
        assert nn_lasso_objective(x, W, a, lam) <= best_val + 1e-5 * max(1.0, best_val)


def test_sparse_code_objective_near_converged_value():
    rng = np.random.default_rng(3)
    W = unit_atoms(rng, 10, 4)
    x = np.abs(rng.standard_normal(10))
    a1 = sparse_code(x, W, lam=0.2, iters=200)
    a2 = sparse_code(x, W, lam=0.2, iters=400)
    v1 = nn_lasso_objective(x, W, a1, 0.2)
    v2 = nn_lasso_objective(x, W, a2, 0.2)
    assert v1 <= v2 * (1 + 1e-6) + 1e-12


def test_sparse_code_rejects_bad_inputs():
    rng = np.random.default_rng(4)
    W = unit_atoms(rng, 6, 3)
    with pytest.raises(ValueError):
        sparse_code(np.ones(5), W)  # length mismatch
    with pytest.raises(ValueError):
        sparse_code(-np.ones(6), W)
    with pytest.raises(ValueError):
        sparse_code(np.ones(6), W, lam=-0.1)


def test_sparse_code_output_nonnegative():
    rng = np.random.default_rng(5)
    for _ in range(10):
        W = unit_atoms(rng, 7, 4)
        x = np.abs(rng.standard_normal(7))
        assert np.all(sparse_code(x, W, lam=0.1) >= 0)


# ---------------------------------------------------------------------------
# training

def planted_frames(rng, m=30, k=5, n=300):
    atoms = np.zeros((m, k))
    for j in range(k):
        support = rng.choice(m, size=6, replace=False)
        atoms[support, j] = rng.uniform(0.3, 1.0, size=6)
    atoms /= np.linalg.norm(atoms, axis=0)
    codes = np.zeros((k, n))
    for i in range(n):
        used = rng.choice(k, size=rng.integers(1, 3), replace=False)
        codes[used, i] = rng.uniform(0.5, 2.0, size=used.size)
    return atoms, atoms @ codes


def test_train_recovers_planted_atoms_and_is_monotone():
    rng = np.random.default_rng(6)
    atoms, frames = planted_frames(rng)
    config = NnscConfig(num_atoms=5, lambda_dict=0.02, max_epochs=40, code_iters=100, seed=0)
    trained, objectives = train_dictionary(frames, config, return_objectives=True)
    diffs = np.diff(objectives)
    assert np.all(diffs <= 1e-12 * np.maximum(1.0, np.abs(objectives[:-1])))
    cosines = atoms.T @ trained.atoms  # columns are unit norm or shorter
    norms = np.linalg.norm(trained.atoms, axis=0)
    cos = cosines / np.maximum(norms, 1e-12)[None, :]
    best = cos.max(axis=1)
    assert np.all(best >= 0.95)


def test_train_rank_one_case():
    rng = np.random.default_rng(7)
    v = np.abs(rng.standard_normal(12))
    v /= np.linalg.norm(v)
    frames = np.tile(v[:, None], (1, 40))
    config = NnscConfig(num_atoms=1, lambda_dict=1e-4, max_epochs=20, code_iters=100, seed=1)
    trained = train_dictionary(frames, config)
    atom = trained.atoms[:, 0]
    assert np.linalg.norm(atom / np.linalg.norm(atom) - v) < 1e-6


def test_train_deterministic_given_seed():
    rng = np.random.default_rng(8)
    _, frames = planted_frames(rng, n=80)
    config = NnscConfig(num_atoms=4, max_epochs=5, code_iters=30, seed=3)
    a = train_dictionary(frames, config)
    b = train_dictionary(frames, config)
    assert a.atoms.tobytes() == b.atoms.tobytes()


def test_train_output_constraints():
    rng = np.random.default_rng(9)
    _, frames = planted_frames(rng, n=100)
    config = NnscConfig(num_atoms=6, max_epochs=8, code_iters=40, seed=2)
    trained = train_dictionary(frames, config)
    assert np.all(trained.atoms >= 0)
    assert np.all(np.linalg.norm(trained.atoms, axis=0) <= 1 + 1e-9)


def test_train_input_validation():
    config = NnscConfig(num_atoms=5)
    with pytest.raises(ValueError):
        train_dictionary(np.abs(np.random.default_rng(0).standard_normal((6, 3))), config)
    with pytest.raises(DegenerateInputError):
        train_dictionary(np.zeros((6, 10)), config)


def test_default_coding_weight_is_inverse_sqrt_bins():
    config = NnscConfig(num_atoms=100)
    assert config.num_atoms == 100 and config.lambda_dict is None
    # lambda_dict=None resolves to 1/sqrt(m) at train time; spot-check via coding
    rng = np.random.default_rng(10)
    W = unit_atoms(rng, 16, 2)
    x = np.abs(rng.standard_normal(16))
    default_run = sparse_code(x, W, lam=None)
    explicit = sparse_code(x, W, lam=1 / np.sqrt(16))
    assert np.array_equal(default_run, explicit)


# ---------------------------------------------------------------------------
# concatenation and splitting

def make_dict(rng, m, k, sr=22050.0, fft=1411):
    return Dictionary(atoms=unit_atoms(rng, m, k), sample_rate_hz=sr, fft_size=fft)


def test_concat_three_dictionaries():
    rng = np.random.default_rng(11)
    parts = [make_dict(rng, 20, 100) for _ in range(3)]
    merged = concat_dictionaries(parts)
    assert merged.num_atoms == 300
    assert merged.groups == (100, 100, 100)
    assert np.array_equal(merged.atoms[:, 100:200], parts[1].atoms)


def test_concat_single_dictionary_identity_with_groups():
    rng = np.random.default_rng(12)
    d = make_dict(rng, 10, 7)
    merged = concat_dictionaries([d])
    assert merged.groups == (7,)
    assert np.array_equal(merged.atoms, d.atoms)


def test_concat_rejects_mismatched_bins_or_metadata():
    rng = np.random.default_rng(13)
    with pytest.raises(ValueError):
        concat_dictionaries([make_dict(rng, 10, 3), make_dict(rng, 12, 3)])
    with pytest.raises(ValueError):
        concat_dictionaries([make_dict(rng, 10, 3), make_dict(rng, 10, 3, sr=44100.0)])


def test_split_activation_blocks_and_restack():
    rng = np.random.default_rng(14)
    Z = rng.standard_normal((5, 4))
    blocks = split_activation(Z, (2, 3))
    assert blocks[0].shape == (2, 4) and blocks[1].shape == (3, 4)
    assert np.array_equal(np.vstack(blocks), Z)
    assert split_activation(Z, (5,))[0].shape == (5, 4)


def test_split_activation_reconstruction_property():
    rng = np.random.default_rng(15)
    k, groups = 300, (100, 100, 100)
    D = np.abs(rng.standard_normal((40, k)))
    Z = rng.standard_normal((k, 25))
    blocks = split_activation(Z, groups)
    total = np.zeros((40, 25))
    for i, block in enumerate(blocks):
        total += D[:, 100 * i:100 * (i + 1)] @ block
    assert np.linalg.norm(total - D @ Z) <= 1e-10 * np.linalg.norm(D @ Z)


def test_split_activation_rejects_bad_partition():
    Z = np.zeros((5, 3))
    with pytest.raises(ValueError):
        split_activation(Z, (2, 2))
    with pytest.raises(ValueError):
        split_activation(Z, (5, 0))


def test_dictionary_validation():
    with pytest.raises(ValueError):
        Dictionary(atoms=-np.ones((4, 2)), sample_rate_hz=22050, fft_size=1411)
    with pytest.raises(ValueError):
        Dictionary(atoms=np.ones((4, 2)), sample_rate_hz=22050, fft_size=1411)  # norm 2
    with pytest.raises(ValueError):
        Dictionary(atoms=np.zeros((4, 2)), sample_rate_hz=22050, fft_size=1411)
    with pytest.raises(ValueError):
        Dictionary(atoms=np.eye(4) / 2, sample_rate_hz=0.0, fft_size=1411)
    with pytest.raises(ValueError):
        Dictionary(atoms=np.eye(4) / 2, sample_rate_hz=22050, fft_size=1411, groups=(3, 3))
