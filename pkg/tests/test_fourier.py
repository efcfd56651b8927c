import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forge.atomic import AtomicMeasure, Window, total_variation, translate
from forge.counterexamples import ks_block, make_nu, q_independent_sample
from forge.fourier import (
    CompactFunction,
    FTEvaluator,
    dilate,
    frac_product,
    ft_compact,
    ft_compact_sup,
    ft_eval,
    ft_product_eval,
    ft_smooth_grid,
    ks_factor_abs2,
    lipschitz_bound,
    parseval_pairing,
    sup_norm_estimate,
    write_ft_csv,
)
from forge.schwartz import cutoff_bump
from forge.sinc import sinc_ft

mpmath.mp.dps = 40


def mp_ft(mu, t):
    """High-precision oracle: sum_j w_j exp(-2 pi i x_j t)."""
    s = mpmath.mpc(0)
    for x, w in zip(mu.positions[:, 0], mu.weights):
        s += mpmath.mpc(w.real, w.imag) * mpmath.expjpi(-2 * mpmath.mpf(float(x)) * mpmath.mpf(float(t)))
    return complex(s)


def test_ft_at_zero_is_total_mass():
    mu = ks_block(0.3, 0.7)
    assert ft_eval(mu, 0.0) == 2.0
    nu = make_nu(q_independent_sample(5))
    assert ft_product_eval(nu, 0.0) == 32.0


@given(st.floats(-1e3, 1e3, allow_nan=False), st.floats(-1e3, 1e3, allow_nan=False))
def test_dirac_transform_has_unit_modulus(v, t):
    val = ft_eval(AtomicMeasure.dirac([v]), t)
    assert abs(abs(val) - 1.0) < 1e-15


@settings(max_examples=60)
@given(st.floats(1e-3, 10.0), st.floats(1e-3, 10.0), st.floats(-200.0, 200.0))
def test_ks_closed_form_against_high_precision(a, b, t):
    if abs(a - b) < 1e-6:
        return
    mu = ks_block(a, b)
    exact = abs(mp_ft(mu, t)) ** 2
    assert abs(abs(ft_eval(mu, t)) ** 2 - exact) <= 1e-12
    # the closed form assumes a+b and a-b are exact; float rounding of those
    # moves the phase by at most one ulp of t*(a+b) each
    slack = 8 * math.pi * abs(t) * math.ulp(a + b)
    assert abs(float(ks_factor_abs2(a, b, t)) - exact) <= 1e-13 + slack
    assert 0.0 <= float(ks_factor_abs2(a, b, t)) <= 8.0 + 1e-12


def test_ks_closed_form_at_zero():
    assert ks_factor_abs2(0.3, 0.8, 0.0) == 4.0


def test_frac_product_recovers_rounding():
    t = np.array([123456.789, 1e6 + 0.1, 3.0])
    x = np.array([math.sqrt(2), math.pi, 1 / 3])
    got = frac_product(t, x)
    for ti, xi, g in zip(t, x, got):
        exact = mpmath.mpf(float(ti)) * mpmath.mpf(float(xi))
        want = float(exact - mpmath.nint(exact))
        assert abs(g - want) < 1e-15


@settings(max_examples=40)
@given(
    st.lists(st.tuples(st.floats(-20, 20), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)), min_size=1, max_size=12),
    st.floats(-30, 30),
    st.floats(-30, 30),
)
def test_ft_bounded_by_tv_and_translation_phase(atoms, t, v):
    mu = AtomicMeasure.from_atoms([((x,), w) for x, w in atoms], 1)
    val = ft_eval(mu, t)
    assert abs(val) <= total_variation(mu) * (1 + 1e-12) + 1e-300
    moved = ft_eval(translate(mu, [v]), t)
    expect = np.exp(-2j * math.pi * (v * t)) * val
    assert abs(moved - expect) <= 1e-12 * max(1.0, total_variation(mu)) * (1 + abs(v * t))


def test_product_matches_enumeration():
    rng = np.random.default_rng(3)
    t = rng.uniform(-50, 50, 200)
    for n in (1, 3, 6):
        nu = make_nu(q_independent_sample(n))
        a = np.asarray(ft_product_eval(nu, t))
        b = np.asarray(ft_eval(nu.enumerate(), t))
        assert np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))) < 1e-9
    single = make_nu(q_independent_sample(1))
    assert np.allclose(ft_product_eval(single, t), ft_eval(single.factors[0], t), rtol=0, atol=1e-14)


def test_product_renormalization_handles_underflow():
    nu = make_nu(q_independent_sample(300))
    small = type(nu)(nu.factors, nu.shift, 1.0, -2000, nu.factor_bounds, nu.certificate)
    v = ft_product_eval(small, 0.0)
    assert v == 2.0 ** (300 - 2000)


def test_lipschitz_bound_atomic():
    mu = AtomicMeasure([[1.0], [-2.0]], [1.0, 3.0])
    assert lipschitz_bound(mu) == pytest.approx(2 * math.pi * 7.0, rel=1e-15)


def test_sup_estimate_block():
    p = q_independent_sample(1)
    mu = ks_block(p.a[0], p.b[0])
    est = sup_norm_estimate(mu, Window.interval(-1e4, 1e4), 0.01, analytic_upper=2 * math.sqrt(2))
    assert est.lower >= 2.8
    assert est.upper <= 2 * math.sqrt(2) * (1 + 1e-9)
    assert est.lower <= est.upper


def test_sup_estimate_dirac_is_one():
    est = sup_norm_estimate(AtomicMeasure.dirac([3.0]), Window.interval(0, 10), 0.1)
    assert abs(est.lower - 1.0) < 1e-15


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 5), st.floats(0.05, 0.5))
def test_sup_estimate_is_sound_on_finer_grids(n, step):
    nu = make_nu(q_independent_sample(n))
    W = Window.interval(0.0, 30.0)
    est = sup_norm_estimate(nu, W, step)
    fine = np.abs(ft_product_eval(nu, np.linspace(0, 30, 30001)))
    # the lower value is attained, the upper one dominates a finer grid
    assert est.lower == pytest.approx(abs(ft_product_eval(nu, est.witness[0])), rel=1e-12)
    assert fine.max() <= est.upper * (1 + 1e-12)


def test_sup_estimate_product_respects_analytic():
    for n in (2, 7):
        nu = make_nu(q_independent_sample(n))
        est = sup_norm_estimate(nu, Window.interval(0, 1e3), 0.01, analytic_upper=2.0 ** (1.5 * n))
        assert est.respects_analytic(1e-9)


def indicator():
    return CompactFunction(lambda x: np.ones_like(np.asarray(x, dtype=float)), 1.0, even=True)


def test_ft_compact_matches_sinc_closed_form():
    t = np.array([0.0, 0.25, 0.5, 1.3, 7.7, 40.0])
    got = ft_compact(indicator(), t, tol=1e-11)
    assert np.max(np.abs(got - sinc_ft("f", t))) < 1e-8


def test_ft_compact_triangle():
    tri = CompactFunction(lambda x: 1.0 - np.abs(np.asarray(x)), 1.0, breakpoints=(0.0,), even=True)
    t = np.array([0.1, 0.9, 3.3])
    want = np.sinc(t) ** 2
    assert np.max(np.abs(ft_compact(tri, t, tol=1e-12) - want)) < 1e-10


def test_ft_compact_high_frequency_does_not_alias():
    phi = cutoff_bump(1.0, 2.0)
    s = np.array([63.75, 64.0])
    a = ft_compact(phi, s, tol=1e-13).real
    _, grid, _ = ft_smooth_grid(phi, 1 / 256, 64 * 256)
    b = grid[[64 * 256 + 63 * 256 + 192, -1]].real
    assert np.max(np.abs(a - b)) < 1e-11


def test_smooth_grid_matches_quadrature():
    phi = cutoff_bump(1.05, 2.05, 0.7)
    t, v, err = ft_smooth_grid(phi, 0.05, 400)
    assert err < 1e-12
    idx = [0, 100, 400, 401, 650, 800]
    assert np.max(np.abs(v[idx] - ft_compact(phi, t[idx], tol=1e-12))) < 1e-11


def test_ft_compact_real_for_even_and_total_integral():
    phi = cutoff_bump(1.0, 2.0)
    v = ft_compact(phi, 0.0, tol=1e-12)
    assert v.imag == 0.0
    assert v.real == pytest.approx(3.0, abs=1e-10)


def test_dilation_covariance():
    phi = cutoff_bump(0.5, 1.0)
    beta, gamma = 0.7, 3.0
    h = dilate(phi, beta, gamma)
    t = np.array([0.0, 1.0, 2.5, 9.0])
    lhs = ft_compact(h, t, tol=1e-12)
    rhs = ft_compact(phi, t / gamma, tol=1e-12) / (beta * gamma)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_ft_compact_sup_adds_tail():
    phi = cutoff_bump(1.0, 2.0)
    est = ft_compact_sup(phi, Window.interval(0, 10), 0.05)
    assert est.lower == pytest.approx(3.0, abs=1e-9)
    assert est.tail_bound is not None and est.upper >= est.lower


def test_parseval_examples():
    a, b = math.sqrt(2) / 2, math.sqrt(3) / 2
    mu = ks_block(a, b)
    phi = cutoff_bump(1.05, 2.05, (a + b) / 2)
    res = parseval_pairing(mu, phi, 200.0)
    assert res.lhs == pytest.approx(2.0, abs=1e-15)
    assert res.gap <= 1e-6
    away = parseval_pairing(mu, cutoff_bump(0.5, 1.0, 10.0), 200.0)
    assert away.lhs == 0 and abs(away.rhs) < 1e-6
    d0 = AtomicMeasure.dirac([0.0])
    bump = cutoff_bump(0.5, 1.5)
    errs = [parseval_pairing(d0, bump, T).gap for T in (2.0, 8.0, 32.0)]
    assert errs[2] < errs[0] and errs[2] < 1e-6


def test_write_ft_csv_empty_and_rows(tmp_path):
    p = tmp_path / "e.csv"
    write_ft_csv(p, [], [])
    assert p.read_text().strip() == "t,re,im,abs"
    write_ft_csv(p, [0.0, 1.0], [2.0, 1j])
    rows = p.read_text().strip().splitlines()
    assert rows[1] == "0,2,0,2" and len(rows) == 3


def test_evaluator_wraps_sources():
    e = FTEvaluator(ks_block(0.3, 0.8))
    assert e.abs(0.0) == 2.0
    assert e.lipschitz_bound == pytest.approx(2 * math.pi * (0.3 + 0.8 + 1.1))
