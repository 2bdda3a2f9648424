"""Counter-based RNG: reference vectors and stream properties."""

import numpy as np

from doiflow.rng import CounterRng, splitmix64

# published splitmix64 outputs for seed 0, plus our frozen vectors for seed 42
SEED0_WORDS = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
SEED42_WORDS = [0xBDD732262FEB6E95, 0x28EFE333B266F103, 0x47526757130F9F52]


def test_reference_vectors():
    assert list(splitmix64(0, 0, 3)) == SEED0_WORDS
    assert list(splitmix64(42, 0, 3)) == SEED42_WORDS


def test_counter_access_matches_stream():
    stream = splitmix64(7, 0, 20)
    for k in range(20):
        assert splitmix64(7, k, 1)[0] == stream[k]


def test_instances_reproduce():
    a = CounterRng(123)
    b = CounterRng(123)
    assert np.array_equal(a.uniform(50), b.uniform(50))
    assert np.array_equal(a.normal(31), b.normal(31))


def test_batching_does_not_change_stream():
    a = CounterRng(5)
    b = CounterRng(5)
    whole = a.uniform(64)
    parts = np.concatenate([b.uniform(16), b.uniform(48)])
    assert np.array_equal(whole, parts)


def test_uniform_range_and_moments():
    u = CounterRng(9).uniform(20000)
    assert np.all((u >= 0) & (u < 1))
    assert abs(np.mean(u) - 0.5) < 0.01


def test_normal_moments():
    g = CounterRng(11).normal(40000)
    assert abs(np.mean(g)) < 0.02
    assert abs(np.std(g) - 1.0) < 0.02


def test_hermitian_and_unitary():
    rng = CounterRng(3)
    h = rng.hermitian(9)
    assert np.max(np.abs(h - h.conj().T)) < 1e-15
    u = rng.unitary(9)
    assert np.max(np.abs(u.conj().T @ u - np.eye(9))) < 1e-13


def test_integers_in_range():
    vals = CounterRng(4).integers(2, 13, 1000)
    assert vals.min() >= 2 and vals.max() <= 12
