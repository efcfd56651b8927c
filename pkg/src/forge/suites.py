"""Verification suites: each returns a SuiteReport of recorded claims."""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import counterexamples as cx
from .atomic import (
    AtomicMeasure,
    BudgetExceeded,
    DEFAULT_ATOM_BUDGET,
    Window,
    hahn_jordan,
    restrict,
    total_variation,
)
from .claims import Claim
from .fourier import ft_compact, ft_eval, ft_product_eval, ks_factor_abs2, parseval_pairing, sup_norm_estimate
from .schwartz import (
    PlateauSchwartz,
    annular_bump,
    cutoff_bump,
    radial_grid,
    seminorm_estimate,
    separation_function,
)
from .sinc import fhat_half_integral
from .temperedness import (
    DyadicProfile,
    block_divergence_terms,
    dyadic_profile,
    growth_test,
    pairing_partial_sums,
    poly_bound_value,
    slow_increase_partial,
)


@dataclass
class Budgets:
    n_max: int = 8
    sup_n_max: int = 12
    m_max: int = 6
    grid_step: float = 0.01
    window: float = 1000.0
    seed: int = 0
    budget_atoms: int = DEFAULT_ATOM_BUDGET


@dataclass
class SuiteReport:
    suite: str
    rows: list = field(default_factory=list)  # (id, Claim)
    runtime: float = 0.0
    budgets: dict = field(default_factory=dict)
    error: str | None = None
    timings: dict = field(default_factory=dict)  # seconds per check, kept out of the deterministic report

    def add(self, cid: str, claim: Claim) -> Claim:
        self.rows.append((cid, claim))
        return claim

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.ok for _, c in self.rows)

    @property
    def failures(self) -> list:
        return [(i, c) for i, c in self.rows if not c.ok]

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "budgets": self.budgets,
            "claims": [{"id": i, **c.to_dict()} for i, c in self.rows],
        }
        if self.error:
            out["error"] = self.error
        if timing:
            out["runtime"] = self.runtime
            out["timings"] = self.timings
        return out

    def write(self, path, timing: bool = False) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(timing), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def summary(self) -> str:
        lines = [f"[{self.suite}] {'PASS' if self.passed else 'FAIL'}  {sum(c.ok for _, c in self.rows)}/{len(self.rows)} claims  {self.runtime:.2f}s"]
        for i, c in self.failures:
            lines.append(f"  fail {i}: {c.claim}: {c.lhs!r} {c.relation} {c.rhs!r} (tol {c.tolerance:g})")
        if self.error:
            lines.append(f"  error: {self.error}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# block and product checks


def ks_pairs(count: int = 20, seed: int = 0) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = rng.uniform(0.01, 3.0, 2)
        if abs(a - b) > 1e-3:
            out.append((float(a), float(b)))
    return out


def check_ks_identity(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    t = np.linspace(-50.0, 50.0, 1000)
    err, lo, hi = 0.0, math.inf, -math.inf
    for a, bb in ks_pairs(20, b.seed):
        mu = cx.ks_block(a, bb)
        direct = np.abs(ft_eval(mu, t)) ** 2
        closed = ks_factor_abs2(a, bb, t)
        err = max(err, float(np.max(np.abs(direct - closed))))
        lo, hi = min(lo, float(closed.min())), max(hi, float(closed.max()))
        rep.add("ks.tv", Claim(f"TV of block ({a:.6g}, {bb:.6g}) == 4", total_variation(mu), 4.0, "=="))
    rep.add("ks.identity", Claim("max | |FT|^2 - closed form |", err, 1e-12, "<="))
    rep.add("ks.range.low", Claim("closed form >= 0", lo, 0.0, ">="))
    rep.add("ks.range.high", Claim("closed form <= 8", hi, 8.0, "<="))
    rep.timings["ks"] = time.perf_counter() - t0


def sign_formula_atoms(params: cx.KSParameters) -> tuple[np.ndarray, np.ndarray]:
    """Positions and signs of all 4^n choices (k_i, l_i), sign (-1)^#{k_i = l_i = 1}."""
    n = params.n
    bits = (np.arange(4**n)[:, None] >> np.arange(2 * n)[None, :]) & 1
    k, l = bits[:, :n], bits[:, n:]
    pos = k @ np.asarray(params.a) + l @ np.asarray(params.b)
    sign = np.where(np.sum(k & l, axis=1) % 2 == 1, -1.0, 1.0)
    order = np.argsort(pos, kind="stable")
    return pos[order], sign[order]


def check_nu_exactness(rep: SuiteReport, b: Budgets) -> None:
    rng = np.random.default_rng(b.seed)
    t0 = time.perf_counter()
    for n in range(1, b.n_max + 1):
        params = cx.q_independent_sample(n)
        nu = cx.make_nu(params)
        atoms = nu.enumerate(b.budget_atoms)
        rep.add(f"nu.{n}.count", Claim(f"n={n}: atom count == 4^n", len(atoms), 4**n, "=="))
        w = atoms.weights
        rep.add(f"nu.{n}.unit", Claim(f"n={n}: weights are +-1", float(np.max(np.abs(np.abs(w) - 1.0))), 0.0, "=="))
        pos, sign = sign_formula_atoms(params)
        x = atoms.positions[:, 0]
        order = np.argsort(x, kind="stable")
        rep.add(f"nu.{n}.sign", Claim(f"n={n}: weights match the sign formula (mismatches)", int(np.sum(w.real[order] != sign)), 0, "=="))
        rep.add(f"nu.{n}.pos", Claim(f"n={n}: positions match subset sums", float(np.max(np.abs(x[order] - pos))), 1e-12, "<="))
        rep.add(f"nu.{n}.tv", Claim(f"n={n}: TV == 2^(2n)", total_variation(atoms), float(4**n), "=="))
        rep.add(f"nu.{n}.support", Claim(f"n={n}: support within [0, 2]", float(x.max()), 2.0, "<="))
        t = rng.uniform(-50.0, 50.0, 1000)
        prod = np.asarray(ft_product_eval(nu, t))
        enum = np.asarray(ft_eval(atoms, t))
        rel = float(np.max(np.abs(prod - enum) / np.maximum(1.0, np.abs(enum))))
        rep.add(f"nu.{n}.ft", Claim(f"n={n}: product vs enumerated FT relative gap", rel, 1e-9, "<="))
    rep.timings["nu"] = time.perf_counter() - t0


def check_sup(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    window = Window.interval(0.0, b.window)
    for n in range(1, b.sup_n_max + 1):
        nu = cx.make_nu(cx.q_independent_sample(n))
        est = sup_norm_estimate(nu, window, b.grid_step, analytic_upper=2.0 ** (1.5 * n))
        rep.add(f"sup.{n}", Claim(f"n={n}: upper on window <= 2^(3n/2)", est.upper_on_window, 2.0 ** (1.5 * n), "<=", 1e-9))
    p = cx.q_independent_sample(1)
    est = sup_norm_estimate(cx.ks_block(p.a[0], p.b[0]), Window.interval(0.0, 1e4), b.grid_step, analytic_upper=cx.KS_SUP)
    rep.add("sup.block.lower", Claim("block lower bound on window 1e4 >= 2.8", est.lower, 2.8, ">="))
    rep.add("sup.block.upper", Claim("block upper bound <= 2 sqrt 2", est.upper, cx.KS_SUP, "<=", 1e-9))
    rep.timings["sup"] = time.perf_counter() - t0


def check_parseval(rep: SuiteReport, b: Budgets) -> None:
    for a, bb in ((math.sqrt(2) / 2, math.sqrt(3) / 2), (0.3, 1.1)):
        mu = cx.ks_block(a, bb)
        phi = cutoff_bump(1.05, 2.05, (a + bb) / 2)
        res = parseval_pairing(mu, phi, 200.0)
        rep.add("parseval.gap", Claim(f"block ({a:.4g}, {bb:.4g}): |lhs - rhs| at T = 200", res.gap, 1e-6, "<="))



# ---------------------------------------------------------------------------
# discrete counterexample


def check_omega(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    window = Window.interval(0.0, b.window)
    for m in range(1, b.m_max + 1):
        om = cx.make_omega(m, window, b.grid_step)
        n = om.n
        target = 4**m * (m * m + 1) ** (2 * m)
        rep.add(f"omega.{m}.n", Claim(f"m={m}: 2^n >= 4^m (m^2+1)^(2m)", 2**n >= target, True, "=="))
        rep.add(f"omega.{m}.nmin", Claim(f"m={m}: n-1 fails", 2 ** (n - 1) < target, True, "=="))
        rep.add(f"omega.{m}.tv", Claim(f"m={m}: log2 TV >= m log2(m^2+1)", om.log2_tv, m * math.log2(m * m + 1), ">="))
        w = np.asarray([om.sup_est.witness[0]])
        hat = float(np.abs(ft_product_eval(om.measure, w))[0])
        rep.add(f"omega.{m}.ft", Claim(f"m={m}: |FT omega| at the grid witness == 2^-m", hat, 2.0**-m, "==", 1e-12))
        ident = math.ldexp(om.measure.scale * om.sup_est.lower, om.measure.scale_exp + m)
        rep.add(f"omega.{m}.identity", Claim(f"m={m}: TV 2^m lower / 2^(2n) == 1", ident, 1.0, "==", 4e-16))
    rep.timings["omega"] = time.perf_counter() - t0



def discrete_divergence(M: int, p: int) -> tuple[float, ...]:
    blocks = cx.omega_blocks(M)
    _, partials = block_divergence_terms([o.log2_tv for o in blocks], [8.0 * m + 2.0 for m in range(1, M + 1)], p)
    return partials


def check_discrete(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    M = 30
    for p in range(1, 7):
        partials = discrete_divergence(M, p)
        rep.add(f"discrete.p{p}.size", Claim(f"p={p}: partial at M=30 > 1e6", partials[-1], 1e6, ">"))
        grow = all(partials[i] > partials[i - 1] for i in range(10, M))
        rep.add(f"discrete.p{p}.increasing", Claim(f"p={p}: partials strictly increasing past m=10", grow, True, "=="))
    rep.timings["discrete"] = time.perf_counter() - t0

    K = Window.interval(6.0, 10.0)
    ref = restrict(cx.discrete_counterexample(1), K, b.budget_atoms)
    om1 = cx.make_omega(1).measure.enumerate(b.budget_atoms)
    shifted = AtomicMeasure(om1.positions + 8.0, om1.weights, 1)
    rep.add("stabilize.block1", Claim("window [6,10] holds exactly the shifted first block", ref.same_atoms(shifted), True, "=="))
    for M2 in (2, 3, 6, 10, 30):
        other = restrict(cx.discrete_counterexample(M2), K, b.budget_atoms)
        rep.add(f"stabilize.M{M2}", Claim(f"restriction to [6,10] identical for M=1 and M={M2}", ref.same_atoms(other), True, "=="))

    window = Window.interval(0.0, b.window)
    for M2 in range(1, min(b.m_max, 6)):
        om = cx.make_omega(M2 + 1, window, b.grid_step)
        rep.add(f"cauchy.{M2}", Claim(f"grid sup of FT difference M={M2} -> {M2 + 1} <= 2^-(M+1)", om.sup_est.lower * om.measure.global_scale, 2.0 ** -(M2 + 1), "<=", 1e-12))

    prof = dyadic_profile(cx.discrete_counterexample(6), 6, b.budget_atoms)
    rep.add("discrete.growth.M6", Claim("M=6 profile verdict is superpolynomial", growth_test(prof).kind, "superpolynomial_evidence", "=="))



# ---------------------------------------------------------------------------
# continuous counterexample


def harmonic(N: int) -> float:
    return math.fsum(1.0 / k for k in range(1, N + 1))


def check_continuous(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    g = cx.construct_g(10.0)
    rep.add("g.l1", Claim("A=10: l1 mass >= 10", g.l1_mass, 10.0, ">="))
    rep.add("g.ftsup", Claim("A=10: sampled sup |FT g| <= 1", g.ft_sup, 1.0, "<=", 1e-6))
    x = math.ldexp(0.75, -g.a_exp)
    rep.add("g.negative", Claim("A=10: -g(0.75/a) > 0", -float(g(np.array([x]))[0]), 0.0, ">"))
    rep.add("g.support", Claim("A=10: g vanishes at |x| = 2", float(np.max(np.abs(g(np.array([-2.0, 2.0, 2.5]))))), 0.0, "=="))

    tame = cx.construct_g(0.3)
    cf = tame.as_compact()
    direct_l1 = float(cf.l1_norm(0, points=400001))
    rep.add("g.tame.l1", Claim("A=0.3: certified l1 <= direct quadrature", tame.l1_mass, direct_l1, "<=", 1e-6))
    t = np.array([0.0, 0.1, 0.2, 0.3, 0.5, 0.8])
    semi = tame.ft(t)
    quad = ft_compact(cf, t, tol=1e-10).real
    rep.add("g.tame.ft", Claim("A=0.3: semi-analytic FT vs quadrature", float(np.max(np.abs(semi - quad))), 1e-6, "<="))

    for n in range(1, 4):
        sg = cx.make_g_n(n)
        rep.add(f"g_n.{n}.l1", Claim(f"n={n}: l1 >= (n^2+1)^n", sg.l1_mass, float((n * n + 1) ** n), ">=", 1e-6))
        rep.add(f"g_n.{n}.ftsup", Claim(f"n={n}: sup |FT| <= 2^-n", sg.ft_sup, 2.0**-n, "<=", 1e-6))
        rep.add(f"g_n.{n}.support", Claim(f"n={n}: support radius <= 1/(n+1)", sg.support_radius, 1.0 / (n + 1), "<=", 1e-6))
        tt = np.array([0.0, 1.0, 7.5])
        rep.add(f"g_n.{n}.ftscale", Claim(f"n={n}: FT scaling law", float(np.max(np.abs(sg.ft(tt) - sg.base.ft(tt / sg.gamma) / (sg.beta * sg.gamma)))), 0.0, "=="))

    for N in (10, 100, 1000):
        val, err = fhat_half_integral(N)
        rep.add(f"harmonic.{N}", Claim(f"N={N}: half-window integral >= H_N / pi^2", val, harmonic(N) / math.pi**2, ">=", 1e-6))

    mu3 = cx.continuous_counterexample(3)
    for j in range(1, 4):
        test = cutoff_bump(0.1, 0.2, -float(j))
        _, _, touched = cx.pair_blocks(mu3, test)
        rep.add(f"cont.touch.{j}", Claim(f"test near -{j} touches only block {j}", touched == (j,), True, "=="))
        blk = mu3.blocks[j - 1][1]
        rep.add(f"cont.mass.{j}", Claim(f"block {j} mass >= (j^2+1)^j", blk.l1, float((j * j + 1) ** j), ">="))
    test = cutoff_bump(0.6, 0.9, -1.5)
    ref = cx.pair_blocks(cx.continuous_counterexample(2), test)[0]
    for N in (3, 4):
        rep.add(f"cont.vague.{N}", Claim(f"pairing unchanged from N=2 to N={N}", cx.pair_blocks(cx.continuous_counterexample(N), test)[0], ref, "=="))
    prof = dyadic_profile(cx.continuous_counterexample(5), 4)
    verdict = growth_test(prof)
    rep.add("cont.growth", Claim("N=5 profile verdict is superpolynomial", verdict.kind, "superpolynomial_evidence", "=="))
    rep.timings["cont"] = time.perf_counter() - t0



# ---------------------------------------------------------------------------
# plateau, growth, decomposition, separation

PLATEAU_SHELLS = 6


def plateau_parameters(N: int = PLATEAU_SHELLS) -> tuple[tuple[int, ...], tuple[float, ...]]:
    k = tuple(4 * n + 4 for n in range(1, N + 1))
    c = tuple(math.ldexp(1.0, -n * kn) for n, kn in zip(range(1, N + 1), k))
    return k, c


def check_plateau(rep: SuiteReport, b: Budgets) -> None:
    t0 = time.perf_counter()
    k, c = plateau_parameters()
    psi = PlateauSchwartz(k, c)
    rng = np.random.default_rng(b.seed)
    worst = 0.0
    for kn, cn in zip(k, c):
        r = np.ldexp(rng.uniform(4.0, 16.0, 100), kn - 3) * rng.choice([-1.0, 1.0], 100)
        worst = max(worst, float(np.max(np.abs(np.asarray(psi(r)) - cn) / cn)))
    rep.add("plateau.values", Claim("plateau equals c_n on its flat shell (max rel)", worst, 1e-15, "<="))
    gaps = np.concatenate([np.linspace(0.0, 2.0 ** (k[0] - 2), 100), np.ldexp(1.0, np.array(k) + 2), np.linspace(2.0 ** (k[-1] + 2), 2.0 ** (k[-1] + 6), 100)])
    rep.add("plateau.gaps", Claim("plateau vanishes outside the shells", float(np.max(np.abs(psi(np.concatenate([gaps, -gaps]))))), 0.0, "=="))
    phi = annular_bump(1)
    grid = radial_grid()
    for al, be in itertools.product(range(4), range(4)):
        lhs = seminorm_estimate(psi, (al,), (be,), grid).value
        base = seminorm_estimate(phi, (al,), (be,), grid).value
        C = psi.seminorm_constant((al,), (be,))
        rep.add(f"plateau.seminorm.{al}{be}", Claim(f"|psi|_({al},{be}) <= C |phi|_({al},{be})", lhs, C * base * (1.0 + 1e-6), "<="))
    rep.timings["plateau"] = time.perf_counter() - t0

    mu = AtomicMeasure(np.ldexp(1.0, np.array(k)).reshape(-1, 1), [math.ldexp(1.0, n * kn) for n, kn in zip(range(1, 7), k)], 1)
    res = pairing_partial_sums(mu, psi)
    for N, s in enumerate(res.partials, start=1):
        rep.add(f"pairing.S{N}", Claim(f"S_{N} == {N}", s, float(N), "==", 1e-6))



def integer_lattice(J: int) -> AtomicMeasure:
    R = 2**J - 1
    return AtomicMeasure(np.arange(-R, R + 1, dtype=float).reshape(-1, 1), np.ones(2 * R + 1), 1)


def check_growth(rep: SuiteReport, b: Budgets) -> None:
    J = 10
    prof = dyadic_profile(integer_lattice(J), J)
    v = growth_test(prof)
    rep.add("growth.lattice.kind", Claim("integer lattice is poly bounded", v.kind, "poly_bounded", "=="))
    rep.add("growth.lattice.a", Claim("lattice exponent a == 1", v.a, 1, "=="))
    rep.add("growth.lattice.c", Claim("lattice constant c <= 2", v.c, 2.0, "<="))
    s = slow_increase_partial(prof, 2)
    rep.add("growth.lattice.partials", Claim("p=2 partials <= I_0 + c 2^(a+1)", max(s.partials), poly_bound_value(v, prof), "<="))
    prof = dyadic_profile(cx.discrete_counterexample(10), 8, b.budget_atoms)
    v = growth_test(prof)
    rep.add("growth.discrete.kind", Claim("M=10 profile is superpolynomial", v.kind, "superpolynomial_evidence", "=="))
    rep.add("growth.discrete.witnesses", Claim("M=10 witness count >= 3", len(v.witnesses), 3, ">="))



def random_measure(rng, max_atoms: int = 40) -> AtomicMeasure:
    k = int(rng.integers(1, max_atoms + 1))
    d = int(rng.integers(1, 3))
    pos = np.round(rng.uniform(-10, 10, (k, d)), 2)
    w = rng.normal(size=k) + 1j * rng.normal(size=k)
    w = np.where(rng.random(k) < 0.2, 1j * w.imag, w)  # some purely imaginary atoms
    w = np.where(rng.random(k) < 0.2, w.real + 0j, w)
    return AtomicMeasure(pos, w, d)


def check_hahn(rep: SuiteReport, b: Budgets) -> None:
    rng = np.random.default_rng(b.seed)
    recon, overlap, excess = 0.0, 0, 0
    for _ in range(1000):
        mu = random_measure(rng)
        hj = hahn_jordan(mu)
        back = hj.recombine()
        if not mu.same_atoms(back):
            diff = (mu - back)
            recon = max(recon, float(np.max(np.abs(diff.weights))) if len(diff) else 0.0)
        tv = total_variation(mu)
        for pos, neg in ((hj.nu_plus, hj.nu_minus), (hj.sigma_plus, hj.sigma_minus)):
            a = {tuple(x) for x in pos.positions}
            overlap += len(a & {tuple(x) for x in neg.positions})
        excess += sum(total_variation(p) > tv for p in hj)
    rep.add("hahn.reconstruct", Claim("max reconstruction error", recon, 1e-15, "<="))
    rep.add("hahn.disjoint", Claim("shared atoms between opposite parts", overlap, 0, "=="))
    rep.add("hahn.bounded", Claim("parts with TV above TV(mu)", excess, 0, "=="))



def separated_points(rng, count: int, gap: float = 0.2) -> np.ndarray:
    steps = gap + rng.exponential(0.5, count)
    return np.cumsum(steps) + rng.uniform(-5, 5)


def check_separation(rep: SuiteReport, b: Budgets) -> None:
    rng = np.random.default_rng(b.seed)
    bad_u, bad_v, worst = 0, 0, -math.inf
    h = 1e-6
    for _ in range(100):
        pts = separated_points(rng, int(rng.integers(2, 30)))
        mask = rng.random(pts.size) < 0.5
        mask[0], mask[-1] = True, False
        U, V = pts[mask].reshape(-1, 1), pts[~mask].reshape(-1, 1)
        f = separation_function(U, V)
        bad_u += int(np.sum(np.asarray(f(U[:, 0])) != 1.0))
        bad_v += int(np.sum(np.asarray(f(V[:, 0])) != 0.0))
        x = np.linspace(pts[0] - 1, pts[-1] + 1, 20001)
        fd = (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2 * h)
        worst = max(worst, float(np.max(np.abs(fd))) - f.derivative_bound(1))
    rep.add("separation.u", Claim("points of U where f != 1", bad_u, 0, "=="))
    rep.add("separation.v", Claim("points of V where f != 0", bad_v, 0, "=="))
    rep.add("separation.derivative", Claim("max FD |f'| minus analytic bound", worst, 1e-3, "<="))




SUITES = {
    "ks": (check_ks_identity, check_nu_exactness, check_sup, check_parseval),
    "omega": (check_omega,),
    "discrete": (check_discrete,),
    "continuous": (check_continuous,),
    "plateau": (check_plateau,),
    "growth": (check_growth,),
    "hahn": (check_hahn,),
    "separation": (check_separation,),
    "parseval": (check_parseval,),
}


def run_suite(name: str, budgets: Budgets | None = None) -> SuiteReport:
    """Run one suite (or "all"); budget overruns end the suite with a partial report."""
    b = budgets or Budgets()
    if name != "all" and name not in SUITES:
        raise KeyError(name)
    t0 = time.perf_counter()
    if name == "all":
        rep = SuiteReport("all")
        for key, checks in SUITES.items():
            if key == "parseval":
                continue  # already part of ks
            sub = _guarded(checks, key, b)
            rep.rows.extend((f"{key}:{i}", c) for i, c in sub.rows)
            rep.timings.update({f"{key}:{k}": v for k, v in sub.timings.items()})
            if sub.error:
                rep.error = sub.error
                break
    else:
        rep = _guarded(SUITES[name], name, b)
    rep.runtime = time.perf_counter() - t0
    rep.budgets = asdict(b)
    return rep


def _guarded(checks, name, b) -> SuiteReport:
    rep = SuiteReport(name)
    for check in checks:
        try:
            check(rep, b)
        except BudgetExceeded as exc:
            rep.error = f"budget exceeded: {exc}"
            break
    return rep
