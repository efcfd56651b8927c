import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forge.schwartz import (
    InsufficientGrowth,
    NotUniformlyDiscrete,
    PlateauSchwartz,
    SmoothTestFunction,
    all_multi_indices,
    annular_bump,
    cutoff_bump,
    leibniz_product_bound,
    mi_below,
    mi_binom,
    reciprocal_coefficients,
    seminorm_estimate,
    separation_function,
    smooth_step,
    smooth_step_jet,
    step_derivative_sups,
)


def mp_step(t):
    """S(t) = rho(t) / (rho(t) + rho(1 - t)), rho(t) = exp(-1/t) for t > 0."""
    t = mpmath.mpf(t)
    rho = lambda u: mpmath.e ** (-1 / u) if u > 0 else mpmath.mpf(0)
    a, b = rho(t), rho(1 - t)
    return a / (a + b)


@given(st.floats(-1.0, 2.0))
def test_smooth_step_symmetry(t):
    assert abs(smooth_step(t) + smooth_step(1.0 - t) - 1.0) <= 1e-15
    assert 0.0 <= smooth_step(t) <= 1.0


def test_smooth_step_against_high_precision():
    mpmath.mp.dps = 40
    ts = [0.0, 1e-3, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0, 1.5, -0.5]
    got = np.array([smooth_step(t) for t in ts])
    want = np.array([float(mp_step(t)) for t in ts])
    assert np.max(np.abs(got - want)) < 2e-16


@pytest.mark.parametrize("t", [0.05, 0.3, 0.5, 0.81, 0.97])
def test_step_jet_matches_mpmath_derivatives(t):
    mpmath.mp.dps = 40
    jet = smooth_step_jet(np.array([t]), 3)[:, 0]
    for k in range(4):
        want = float(mpmath.diff(mp_step, t, k))
        assert jet[k] == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_step_jet_is_flat_outside():
    jet = smooth_step_jet(np.array([-0.3, 0.0, 1.0, 1.4]), 3)
    assert np.all(jet[1:] == 0.0)
    assert jet[0].tolist() == [0.0, 0.0, 1.0, 1.0]


def test_step_derivative_sups_are_plausible():
    s = step_derivative_sups()
    assert s[0] == 1.0
    t = np.linspace(0, 1, 4001)
    jet = smooth_step_jet(t, 3)
    for k in (1, 2, 3):
        assert np.max(np.abs(jet[k])) <= s[k] * (1 + 1e-9)


def test_annular_bump_values():
    sig = annular_bump()
    assert sig(8.0) == 1.0
    assert sig(-8.0) == 1.0
    assert sig(2 / 32) == 0.0
    assert sig(3.0) == pytest.approx(0.5, abs=1e-15)
    assert sig(33.0) == 0.0 and sig(1.9) == 0.0
    x = np.linspace(-40, 40, 8001)
    v = sig(x)
    assert v.min() >= 0.0 and v.max() <= 1.0


def test_annular_bump_2d():
    sig = annular_bump(2)
    assert sig(np.array([[8.0, 0.0], [0.0, 3.0], [0.5, 0.5]])).tolist() == pytest.approx([1.0, 0.5, 0.0], abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_annular_bump_exact_vs_difference_quotients(k):
    sig = annular_bump()
    fd = SmoothTestFunction(1, lambda p: sig(p[:, 0]), None)
    x = np.array([-20.0, -2.7, 2.9, 3.4, 17.0, 25.0, 31.0])
    exact = np.asarray(sig.derivative(k, x))
    approx = np.asarray(fd.derivative(k, x))
    assert np.max(np.abs(exact - approx)) < 10.0 ** (-8 + 2 * k)


def test_cutoff_bump_shape():
    phi = cutoff_bump(1.0, 2.0, 5.0)
    assert phi(5.0) == 1.0 and phi(6.0) == 1.0 and phi(7.0) == 0.0
    assert phi(5.5) == 1.0 and phi(3.0) == 0.0
    assert phi.support == (3.0, 7.0)
    with pytest.raises(ValueError):
        cutoff_bump(2.0, 1.0)


def test_plateau_examples():
    psi = PlateauSchwartz([4, 8], [1.0, 0.5])
    assert psi(0.0) == 0.0
    assert psi(2.0**4) == 1.0  # the base bump is 1 on 4 <= |x| <= 16, scaled by 2^(k-3)
    assert psi(2.0**8 * 1.5) == 0.5
    assert psi(-2.0**8) == 0.5
    assert psi(2.0**12) == 0.0
    with pytest.raises(ValueError):
        PlateauSchwartz([4, 7], [1.0, 1.0])
    with pytest.raises(ValueError):
        PlateauSchwartz([3], [1.0])
    with pytest.raises(ValueError):
        PlateauSchwartz([4], [0.0])


@settings(max_examples=30)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).map(lambda g: np.cumsum(np.array(g) + 4) + 4))
def test_plateau_value_on_each_plateau(ks):
    c = [2.0 ** -i for i in range(len(ks))]
    psi = PlateauSchwartz(ks.tolist(), c)
    for k, cn in zip(ks, c):
        x = np.ldexp(np.array([1.0, 1.3, 1.9]), int(k) - 1)
        assert np.all(psi(x) == cn)


def test_plateau_round_trip_and_constant():
    psi = PlateauSchwartz([4, 9, 20], [1.0, 1e-3, 1e-9])
    assert PlateauSchwartz.from_dict(psi.to_dict()).to_dict() == psi.to_dict()
    assert psi.seminorm_constant(0, 0) == 1.0
    assert psi.seminorm_constant(0, 1) == max(1.0 * 2, 1e-3 * 2**6, 1e-9 * 2**17)


def test_seminorm_examples():
    zero = SmoothTestFunction(1, lambda p: np.zeros(p.shape[0]), lambda a, p: np.zeros(p.shape[0]), 1.0)
    assert seminorm_estimate(zero, 2, 1).value == 0.0
    psi = PlateauSchwartz([4, 8, 12], [1.0, 0.25, 0.125])
    assert seminorm_estimate(psi, 0, 0).value == 1.0
    # x^beta weighting is the plateau value times the largest |x| on that plateau
    est = seminorm_estimate(psi, 0, 1)
    assert est.value >= 0.125 * 2.0**9 * 16 * (1 - 1e-12)


def test_seminorm_scales_with_shell():
    base = PlateauSchwartz([4], [1.0])
    far = PlateauSchwartz([10], [1.0])
    for a, b in ((1, 0), (2, 1), (3, 3)):
        s0 = seminorm_estimate(base, a, b).value
        s1 = seminorm_estimate(far, a, b).value
        assert s1 == pytest.approx(s0 * 2.0 ** (6 * (b - a)), rel=1e-12)


def test_multi_index_helpers():
    assert list(mi_below((1, 1))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert mi_binom((3, 2), (1, 1)) == 6
    assert len(list(all_multi_indices(2, 2))) == 6


def test_leibniz_bound_example():
    f_sups = {(0,): 1.0, (1,): 2.0, (2,): 4.0}
    phi = {((0,), (1,)): 3.0, ((1,), (1,)): 5.0, ((2,), (1,)): 7.0}
    assert leibniz_product_bound(f_sups, phi, (2,), (1,)) == 1 * 1.0 * 7.0 + 2 * 2.0 * 5.0 + 1 * 4.0 * 3.0
    with pytest.raises(ValueError):
        leibniz_product_bound({(0,): 1.0}, phi, (1,), (1,))


@pytest.mark.parametrize("a", [0, 1, 2, 3])
def test_leibniz_dominates_product_of_sin_and_bump(a):
    phi = cutoff_bump(0.5, 1.0)
    grid = np.linspace(-1, 1, 4001)
    phi_fn = SmoothTestFunction(1, lambda p: phi(p[:, 0]), lambda al, p: phi.derivatives[al[0] - 1](p[:, 0]), 1.0)
    prod = SmoothTestFunction(1, lambda p: np.sin(3 * p[:, 0]) * phi(p[:, 0]), None, 1.0)
    f_sups = {(g,): 3.0**g for g in range(4)}
    semis = {((g,), (1,)): seminorm_estimate(phi_fn, g, 1, grid).value for g in range(4)}
    bound = leibniz_product_bound(f_sups, semis, (a,), (1,))
    direct = seminorm_estimate(prod, a, 1, grid).value
    assert direct <= bound * (1 + 1e-3)


def test_reciprocal_coefficients_examples():
    m = [2.0 ** (j * j / 2) for j in range(44)]
    ks, cs = reciprocal_coefficients(m)
    assert ks[0] >= 5
    assert all(b - a >= 5 for a, b in zip(ks, ks[1:]))
    for i, (k, c) in enumerate(zip(ks, cs), start=1):
        assert math.log2(m[k]) > i * k
        assert c == 1.0 / m[k]
    with pytest.raises(InsufficientGrowth):
        reciprocal_coefficients([2.0**j for j in range(60)])


def test_separation_integer_lattice():
    U = np.arange(-5, 6, dtype=float)
    V = U + 0.5
    f = separation_function(U, V)
    assert f.r == 0.25
    assert np.all(f(U) == 1.0)
    assert np.all(f(V) == 0.0)
    x = np.linspace(-6, 6, 2001)
    v = f(x)
    assert v.min() >= 0 and v.max() <= 1
    d1 = np.abs(np.asarray(f.derivative(1, x)))
    assert d1.max() <= f.derivative_bound(1) * (1 + 1e-12)


def test_separation_degenerate_cases():
    empty = separation_function(np.empty((0, 1)), np.array([[0.0]]))
    assert empty(np.array([0.0, 1.0])).tolist() == [0.0, 0.0]
    single = separation_function(np.array([[2.0]]), np.empty((0, 1)))
    assert single(2.0) == 1.0
    with pytest.raises(NotUniformlyDiscrete):
        separation_function(np.array([[0.0]]), np.array([[0.0]]))


@pytest.mark.parametrize("k", [1, 2])
def test_separation_jets_vs_difference_quotients(k):
    f = separation_function(np.array([0.0, 1.0]), np.array([0.5]))
    fd = SmoothTestFunction(1, f._eval, None)
    x = np.array([0.05, 0.1, 0.9, 1.08])
    assert np.max(np.abs(np.asarray(f.derivative(k, x)) - np.asarray(fd.derivative(k, x)))) < 1e-4
