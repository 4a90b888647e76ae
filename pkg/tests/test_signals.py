import math

import numpy as np
import pytest

from ipvb import SignalError, SparseSignal, generate_signal, reconstruction_success
from ipvb.signals import parse_signal, write_signal


def test_generate_empty_support():
    sig = generate_signal(10, 0, seed=7)
    assert sig.support_size == 0
    assert np.array_equal(sig.to_dense(), np.zeros(10))


def test_generate_deterministic():
    assert generate_signal(504, 25, seed=3) == generate_signal(504, 25, seed=3)
    assert generate_signal(504, 25, seed=3) != generate_signal(504, 25, seed=4)


def test_generate_invariants():
    sig = generate_signal(504, 25, seed=3)
    assert sig.support_size == 25
    assert np.all(sig.values > 0)
    assert np.all(np.diff(sig.support) > 0)
    assert 0.0 <= sig.sparsity <= 1.0


def test_generate_values_on_binary_grid():
    # nonzero values are multiples of 2**-40 so measurement sums are exact
    sig = generate_signal(504, 50, seed=11)
    scaled = np.ldexp(sig.values, 40)
    assert np.array_equal(scaled, np.round(scaled))


def test_half_normal_moment():
    # mean of |N(0,1)| is sqrt(2/pi); estimate over 1e5 draws
    values = np.concatenate([
        generate_signal(504, 25, seed=s).values for s in range(4000)
    ])
    assert values.size == 100_000
    mean = values.mean()
    expected = math.sqrt(2.0 / math.pi)
    assert abs(mean - expected) / expected < 0.01


def test_generate_errors():
    with pytest.raises(SignalError, match="support size"):
        generate_signal(5, 6, seed=0)


def test_sparse_signal_validation():
    with pytest.raises(SignalError, match="duplicate"):
        SparseSignal(5, [1, 1], [1.0, 2.0])
    with pytest.raises(SignalError, match="out of range"):
        SparseSignal(5, [5], [1.0])
    with pytest.raises(SignalError, match="strictly positive"):
        SparseSignal(5, [1], [0.0])
    with pytest.raises(SignalError, match="equal length"):
        SparseSignal(5, [1, 2], [1.0])


def test_success_examples():
    sig = SparseSignal(3, [1], [2.0])
    assert reconstruction_success(sig, np.array([0.0, 2.0, 0.0]))
    assert not reconstruction_success(sig, np.zeros(3))
    nudged = np.array([0.0, 2.0 + 1e-9, 0.0])
    assert reconstruction_success(sig, nudged)


def test_success_symmetric_comparison():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = np.abs(rng.standard_normal(8))
        b = a.copy()
        b[rng.integers(8)] += rng.choice([0.0, 1e-8, 1e-3])
        peak = max(a.max(), b.max())
        a[np.argmax(a)] = peak
        b[np.argmax(b)] = peak
        assert reconstruction_success(a, b) == reconstruction_success(b, a)


def test_success_length_mismatch():
    with pytest.raises(SignalError, match="length mismatch"):
        reconstruction_success(SparseSignal(3, [0], [1.0]), np.zeros(4))


def test_signal_file_round_trip():
    sig = generate_signal(504, 25, seed=3)
    text = write_signal(sig)
    lines = text.splitlines()
    assert lines[0] == "504 25"
    first_idx = int(lines[1].split()[0])
    assert first_idx == int(sig.support[0]) + 1
    assert parse_signal(text) == sig


def test_signal_file_errors():
    with pytest.raises(SignalError, match="line 1"):
        parse_signal("")
    with pytest.raises(SignalError, match="entry lines"):
        parse_signal("5 2\n1 1.0\n")
    with pytest.raises(SignalError, match="out of range"):
        parse_signal("5 1\n6 1.0\n")
