import math

import numpy as np
import pytest
from scipy import integrate

from forge.atomic import BudgetExceeded, Window, distinctness_check, restrict, total_variation, translate
from forge.claims import Claim, ConstructionError, require
from forge.counterexamples import (
    BLOCK_SPACING,
    KS_SUP,
    KSParameters,
    ScaledG,
    construct_g,
    continuous_counterexample,
    discrete_counterexample,
    first_primes,
    g_n_parameters,
    ks_block,
    make_g_n,
    make_nu,
    make_omega,
    minimal_n,
    omega_blocks,
    pair_blocks,
    phi_hat_l1,
    q_independent_sample,
)
from forge.fourier import CompactFunction, ft_compact, ft_eval, ft_product_eval
from forge.schwartz import cutoff_bump
from forge.temperedness import dyadic_profile


def brute_minimal_n(m):
    target = 4**m * (m * m + 1) ** (2 * m)
    n = 0
    while 2**n < target:
        n += 1
    return n


def sign_formula(a, b):
    """Atoms of the convolution: sum of chosen terms, sign (-1)^(number of a_i+b_i picks)."""
    atoms = [(0.0, 1)]
    for ai, bi in zip(a, b):
        atoms = [(x + y, s * t) for x, s in atoms for y, t in ((0.0, 1), (ai, 1), (bi, 1), (ai + bi, -1))]
    return sorted(atoms)


def test_first_primes():
    assert first_primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert first_primes(0) == []
    assert first_primes(1000)[-1] == 7919


def test_sample_n1_values():
    p = q_independent_sample(1)
    assert p.a == (math.sqrt(2) / 2,)
    assert p.b == (math.sqrt(3) / 2,)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 40])
def test_sample_is_in_range_distinct_and_deterministic(n):
    p = q_independent_sample(n)
    vals = p.a + p.b
    assert all(0 < v <= 1 / n for v in vals)
    assert len(set(vals)) == 2 * n
    assert q_independent_sample(n) == p


def test_parameters_validation():
    with pytest.raises(ValueError):
        KSParameters(2, (0.1, 0.2), (0.3, 0.9))
    with pytest.raises(ValueError):
        KSParameters(1, (0.5,), (0.5,))
    with pytest.raises(ValueError):
        q_independent_sample(0)
    with pytest.raises(ValueError):
        ks_block(0.0, 0.5)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_nu_matches_sign_formula(n):
    p = q_independent_sample(n)
    nu = make_nu(p).enumerate()
    want = sign_formula(p.a, p.b)
    got = sorted(zip(nu.positions[:, 0].tolist(), nu.weights.real.astype(int).tolist()))
    assert len(got) == 4**n
    assert [s for _, s in got] == [s for _, s in want]
    assert np.max(np.abs(np.array([x for x, _ in got]) - np.array([x for x, _ in want]))) <= 1e-12
    assert total_variation(nu) == 4.0**n
    assert nu.positions.max() <= 2.0


def test_nu_certificate_and_lazy_tv():
    assert distinctness_check(make_nu(q_independent_sample(6))).distinct
    big = make_nu(q_independent_sample(30))
    assert big.log2_total_variation_bound() == 60.0
    assert "asserted" in big.certificate


def test_ks_block_sup_reaches_bound():
    p = q_independent_sample(1)
    t = np.linspace(-1e4, 1e4, 2_000_001)
    v = np.abs(ft_eval(ks_block(p.a[0], p.b[0]), t))
    assert 2.8 <= v.max() <= KS_SUP * (1 + 1e-12)


@pytest.mark.parametrize("m", range(1, 10))
def test_minimal_n(m):
    assert minimal_n(m) == brute_minimal_n(m)


def test_minimal_n_frozen():
    assert [minimal_n(m) for m in range(1, 10)] == [4, 14, 26, 41, 58, 75, 94, 113, 133]


def test_omega_m1_by_enumeration():
    om = make_omega(1)
    assert om.n == 4 and om.mode == "estimated"
    assert all(c.ok for c in om.claims)
    atoms = om.measure.enumerate()
    assert total_variation(atoms) == pytest.approx(om.tv, rel=1e-14)
    assert math.log2(om.tv) >= math.log2(2.0)
    w = om.sup_est.witness[0]
    assert abs(ft_eval(atoms, w)) == pytest.approx(0.5, abs=1e-12)
    t = np.linspace(0, 1000, 100001)
    assert np.abs(ft_product_eval(om.measure, t)).max() <= 0.5 * (1 + 1e-9)


def test_omega_budget():
    with pytest.raises(BudgetExceeded):
        make_omega(3, n_budget=20)


def test_omega_is_cached_and_deterministic():
    assert make_omega(2) is make_omega(2)
    assert make_omega(2).report() == make_omega(2).report()


def test_discrete_blocks_are_shifted_omegas():
    M = 3
    mu = discrete_counterexample(M)
    blocks = omega_blocks(M)
    assert len(mu.blocks) == M
    for m, (s, p) in enumerate(mu.blocks, start=1):
        assert s[0] == BLOCK_SPACING * m
        assert p is blocks[m - 1].measure
    first = restrict(mu, Window.interval(6.0, 10.0))
    assert first == translate(blocks[0].measure.enumerate(), [8.0])


def test_discrete_profile_lands_in_expected_annuli():
    mu = discrete_counterexample(2)
    prof = dyadic_profile(mu, 5)
    tv1, tv2 = omega_blocks(2)[0].tv, omega_blocks(2)[1].tv
    # block 1 lives in [6, 10] (A_3 and A_4), block 2 in [14, 18] (A_4 and A_5)
    assert sum(prof.masses) == pytest.approx(tv1 + tv2, rel=1e-12)
    assert prof.masses[:3] == (0.0, 0.0, 0.0)


def test_phi_hat_l1_bounds():
    c = phi_hat_l1()
    assert c.core <= c.upper
    assert c.upper == pytest.approx(1.6124689, abs=1e-6)


def test_tame_g_against_direct_quadrature():
    g = construct_g(0.3)
    assert all(c.ok for c in g.claims)
    l1, _ = integrate.quad(lambda x: abs(float(g(np.array([x]))[0])), -2, 2, limit=400, epsabs=1e-10)
    assert l1 >= 0.3
    assert l1 >= g.l1_mass * (1 - 1e-9)
    t = np.array([0.0, 0.3, 1.7, 4.0, 9.5])
    direct = ft_compact(g.as_compact(), t, tol=1e-11)
    assert np.max(np.abs(np.asarray(g.ft(t)) - direct)) <= 1e-6
    assert g.ft_sup <= 1.0


def test_dilation_scaling_law():
    g = construct_g(0.3)
    sg = ScaledG(g, 1, 0.7, 3.0)
    assert sg.support_radius == pytest.approx(2.0 / 3.0)
    f = CompactFunction(lambda x: sg(np.asarray(x)), sg.support_radius)
    t = np.array([0.0, 1.0, 5.5])
    assert np.max(np.abs(ft_compact(f, t, tol=1e-11) - sg.ft(t))) <= 1e-6
    x = np.linspace(-0.6, 0.6, 7)
    assert np.allclose(sg(x), g(3.0 * x) / 0.7, rtol=0, atol=1e-15)


def test_large_g_claims():
    g = construct_g(10.0)
    assert g.a_exp == 53 and g.n_exp == 113
    assert g.l1_mass >= 10.0
    assert g.ft_sup <= 1.0
    with pytest.raises(ValueError):
        construct_g(0.0)


@pytest.mark.parametrize("n", [1, 2])
def test_g_n(n):
    sg = make_g_n(n)
    A, beta, gamma = g_n_parameters(n)
    assert A == 2**n * (n * n + 1) ** n
    assert sg.l1_mass >= (n * n + 1) ** n
    assert sg.ft_sup <= 2.0**-n
    assert sg.support_radius <= 1 / (n + 1)
    t = np.array([0.0, 0.5, 3.0])
    assert np.allclose(sg.ft(t), sg.base.ft(t / gamma) / (beta * gamma), rtol=0, atol=1e-15)


def test_continuous_pairing_touches_one_block():
    mu = continuous_counterexample(3)
    test = cutoff_bump(0.4, 0.45, -2.0)
    val, err, touched = pair_blocks(mu, test)
    assert touched == (2,)
    sg = make_g_n(2)
    # test is 1 on the support of g_2, so the pairing is its total integral
    assert abs(val - float(sg.ft(np.array([0.0]))[0].real)) <= err + 1e-9


def test_continuous_blocks_are_disjoint():
    mu = continuous_counterexample(3)
    boxes = mu.block_boxes()
    for (lo1, hi1), (lo2, hi2) in zip(boxes, boxes[1:]):
        assert hi2[0] < lo1[0]


def test_failed_claims_raise_unless_lenient():
    bad = [Claim("two is small", 2.0, 1.0, "<=")]
    with pytest.raises(ConstructionError):
        require(bad)
    require(bad, strict=False)
    assert not bad[0].ok and bad[0].status == "fail"
    assert Claim("close", 1.0 + 1e-13, 1.0, "==", 1e-12).ok
