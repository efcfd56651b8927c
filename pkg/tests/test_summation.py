import math

import numpy as np
from hypothesis import given, strategies as st

from forge.summation import Accumulator, fsum_complex, neumaier_sum

finite = st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False)


@given(st.lists(finite, max_size=600))
def test_matches_fsum(xs):
    got = neumaier_sum(np.array(xs, dtype=float))
    want = math.fsum(xs)
    scale = math.fsum(abs(x) for x in xs)
    assert abs(got - want) <= 4 * np.finfo(float).eps * scale + 1e-300


@given(st.lists(st.tuples(finite, finite), max_size=300), st.integers(1, 64))
def test_chunking_does_not_matter_beyond_rounding(pairs, chunk):
    z = np.array([complex(a, b) for a, b in pairs], dtype=complex)
    want = fsum_complex(z)
    got = neumaier_sum(z, chunk=chunk)
    scale = float(np.abs(z.real).sum() + np.abs(z.imag).sum())
    assert abs(got - want) <= 8 * np.finfo(float).eps * scale + 1e-300


def test_cancellation_example():
    x = np.array([1e16, 1.0, -1e16] * 1000)
    assert np.sum(x) != 1000.0
    assert neumaier_sum(x) == 1000.0


def test_axis_and_empty():
    m = np.array([[1e16, 1.0], [1.0, 2.0], [-1e16, 3.0]])
    assert neumaier_sum(m, axis=0).tolist() == [1.0, 6.0]
    assert neumaier_sum(m, axis=1).tolist() == [1e16 + 1.0, 3.0, -1e16 + 3.0]
    assert neumaier_sum(np.empty(0)) == 0.0


def test_deterministic():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(10_000) * 10.0 ** rng.integers(-8, 8, 10_000)
    assert neumaier_sum(x) == neumaier_sum(x.copy())


def test_accumulator_running():
    acc = Accumulator((), complex)
    for v in (1e16 + 1j, 1.0, -1e16):
        acc.add(v)
    assert acc.value() == 1 + 1j
    real = Accumulator((2,), float)
    real.add([1e16, 1.0])
    real.add([1.0, 1e-16])
    real.add([-1e16, 0.0])
    assert real.value().tolist() == [1.0, 1.0 + 1e-16]


def test_fsum_complex():
    assert fsum_complex([0.1] * 10) == 1.0 + 0j
    assert fsum_complex([1j, -1j, 2.0]) == 2.0
