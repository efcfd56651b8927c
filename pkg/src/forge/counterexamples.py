"""Factories for the counterexample measures.

Discrete side: blocks d_0 + d_a + d_b - d_{a+b}, their n-fold convolutions
nu_n, rescaled blocks omega_m with tiny transforms but large mass, and the
assembled block measure sum_m d_{8m} * omega_m.

Continuous side: a function g supported in [-2, 2] with ||g||_1 >= A and
sup |FT g| <= 1, its rescalings g_n, and the density-block measure built from
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .atomic import (
    AtomicMeasure,
    BlockMeasure,
    BudgetExceeded,
    DensityBlock,
    ProductMeasure,
    Window,
    certify,
)
from .claims import Claim, require
from .fourier import (
    CompactFunction,
    SupEstimate,
    _simpson_uniform,
    ft_compact,
    ft_product_eval,
    ft_smooth_grid,
    sup_norm_estimate,
)
from .schwartz import cutoff_bump, smooth_step_jet
from .sinc import MassParameters, find_mass_parameters, first_true, sinc, window_l1_lower

KS_SUP = 2.0 * math.sqrt(2.0)


# ---------------------------------------------------------------------------
# discrete blocks


def ks_block(a: float, b: float) -> AtomicMeasure:
    """d_0 + d_a + d_b - d_{a+b}."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if a == b:
        raise ValueError("a == b makes two atoms coincide")
    return AtomicMeasure(np.array([[0.0], [a], [b], [a + b]]), [1.0, 1.0, 1.0, -1.0], 1)


def first_primes(k: int) -> list[int]:
    if k < 1:
        return []
    bound = max(15, int(k * (math.log(k) + math.log(math.log(k + 2)) + 2)))
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    primes = np.flatnonzero(sieve)
    if len(primes) < k:
        raise RuntimeError("prime sieve bound too small")
    return [int(p) for p in primes[:k]]


@dataclass(frozen=True)
class KSParameters:
    n: int
    a: tuple[float, ...]
    b: tuple[float, ...]
    provenance: str = "user"

    def __post_init__(self):
        if len(self.a) != self.n or len(self.b) != self.n:
            raise ValueError("need n values in each of a and b")
        vals = self.a + self.b
        if any(not (0 < v <= 1.0 / self.n) for v in vals):
            raise ValueError("values must lie in (0, 1/n]")
        if len(set(vals)) != len(vals):
            raise ValueError("values must be pairwise distinct")


def q_independent_sample(n: int) -> KSParameters:
    """a_i = sqrt(p_{2i-1}) / (ceil(sqrt p_{2n}) n), b_i = sqrt(p_{2i}) / (ceil(sqrt p_{2n}) n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = first_primes(2 * n)
    denom = math.isqrt(p[-1] - 1) + 1  # ceil(sqrt(p)) for a prime p
    denom *= n
    a = tuple(math.sqrt(p[2 * i]) / denom for i in range(n))
    b = tuple(math.sqrt(p[2 * i + 1]) / denom for i in range(n))
    return KSParameters(n, a, b, "sqrt-prime-scaled")


ENUMERATION_CERTIFY_MAX = 8


def make_nu(params: KSParameters, certify_up_to: int = ENUMERATION_CERTIFY_MAX) -> ProductMeasure:
    """Lazy n-fold convolution of the ks blocks."""
    factors = tuple(ks_block(a, b) for a, b in zip(params.a, params.b))
    p = ProductMeasure.of(factors, factor_bounds=(KS_SUP,) * params.n)
    if params.n <= certify_up_to:
        return certify(p)
    note = "q-independent construction (asserted)" if params.provenance == "sqrt-prime-scaled" else None
    return ProductMeasure(p.factors, p.shift, p.scale, p.scale_exp, p.factor_bounds, note)


def minimal_n(m: int) -> int:
    """Smallest n with 2^(n/2) >= 2^m (m^2+1)^m, in exact integer arithmetic."""
    rhs = 4**m * (m * m + 1) ** (2 * m)
    return (rhs - 1).bit_length()


N_BUDGET = 128
SUP_WINDOW = Window.interval(0.0, 1000.0)
SUP_STEP = 0.01


@dataclass(frozen=True)
class OmegaBlock:
    m: int
    n: int
    nu: ProductMeasure
    measure: ProductMeasure
    mode: str  # "estimated" or "analytic"
    sup_est: SupEstimate | None
    claims: tuple[Claim, ...] = ()

    @property
    def log2_tv(self) -> float:
        return self.measure.log2_total_variation_bound()

    @property
    def tv(self) -> float:
        return math.ldexp(self.measure.scale, self.measure.scale_exp + 2 * self.n)

    @property
    def scale(self) -> float:
        return self.measure.global_scale

    def report(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "mode": self.mode,
            "log2_tv": self.log2_tv,
            "sup_est": None if self.sup_est is None else self.sup_est.to_dict(),
            "claims": [c.to_dict() for c in self.claims],
        }


def _omega_claims(m, n, omega, sup_est, mode) -> list[Claim]:
    target = m * math.log2(m * m + 1)
    claims = [
        Claim("2^n >= 4^m (m^2+1)^(2m) at minimal n", n, float((4**m * (m * m + 1) ** (2 * m) - 1).bit_length()), "=="),
        Claim("log2 TV(omega_m) >= m log2(m^2+1)", omega.log2_total_variation_bound(), target, ">=", 1e-12),
    ]
    if mode == "estimated":
        lower = sup_est.lower
        w = np.asarray([sup_est.witness[0]])
        omega_hat = float(np.abs(ft_product_eval(omega, w))[0])
        claims.append(Claim("|FT omega_m| at the witness == 2^-m", omega_hat, 2.0**-m, "==", 1e-12))
        ident = math.ldexp(omega.scale * lower, omega.scale_exp + m)
        claims.append(Claim("TV(omega_m) 2^m sup_lower == 2^(2n)", ident, 1.0, "==", 4e-16))
        claims.append(Claim("sup estimate upper <= 2^(3n/2)", sup_est.upper, 2.0 ** (1.5 * n), "<=", 1e-9))
    else:
        claims.append(Claim("2^m sup|FT omega_m| bound <= 1", omega.log2_scale + 1.5 * n + m, 0.0, "<=", 1e-12))
    return claims


@lru_cache(maxsize=None)
def _make_omega_cached(m: int, window: Window, grid_step: float, mode: str, n_budget: int) -> OmegaBlock:
    n = minimal_n(m)
    if n > n_budget:
        raise BudgetExceeded(f"m={m} needs n={n} > product-form budget {n_budget}")
    nu = make_nu(q_independent_sample(n))
    if mode == "estimated":
        sup_est = sup_norm_estimate(nu, window, grid_step, analytic_upper=2.0 ** (1.5 * n))
        mant, e = math.frexp(sup_est.lower)
        scale, scale_exp = 1.0 / mant, -e - m
    elif mode == "analytic":
        sup_est = None
        half = 3 * n  # 2^(-m - 3n/2)
        scale = 1.0 if half % 2 == 0 else 2.0**-0.5
        scale_exp = -m - half // 2
    else:
        raise ValueError(f"unknown mode {mode!r}")
    omega = ProductMeasure(nu.factors, nu.shift, scale, scale_exp, nu.factor_bounds, nu.certificate)
    claims = require(_omega_claims(m, n, omega, sup_est, mode))
    return OmegaBlock(m, n, nu, omega, mode, sup_est, tuple(claims))


def make_omega(m: int, sup_window: Window = SUP_WINDOW, grid_step: float = SUP_STEP, mode: str = "estimated", n_budget: int = N_BUDGET) -> OmegaBlock:
    """omega_m = nu_n / (2^m sup|FT nu_n|) at the minimal admissible n."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _make_omega_cached(m, sup_window, float(grid_step), mode, n_budget)


BLOCK_SPACING = 8.0
BLOCK_RADIUS = 2.0


def discrete_counterexample(M: int, mode: str = "auto", sup_window: Window = SUP_WINDOW, grid_step: float = SUP_STEP, n_budget: int = N_BUDGET) -> BlockMeasure:
    """sum_{m <= M} d_{8m} * omega_m.

    mode "auto" uses the estimated sup while n fits the product budget and
    the analytic scale 2^(-m - 3n/2) beyond it.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    blocks = []
    for m in range(1, M + 1):
        mm = mode
        if mode == "auto":
            mm = "estimated" if minimal_n(m) <= n_budget else "analytic"
        om = make_omega(m, sup_window, grid_step, mm, n_budget if mm == "estimated" else max(n_budget, minimal_n(m)))
        blocks.append((np.array([BLOCK_SPACING * m]), om.measure))
    return BlockMeasure(tuple(blocks), BLOCK_RADIUS, np.array([BLOCK_SPACING]), tuple(f"omega_{m}" for m in range(1, M + 1)))


def omega_blocks(M: int, mode: str = "auto", **kw) -> list[OmegaBlock]:
    out = []
    for m in range(1, M + 1):
        mm = mode
        if mode == "auto":
            mm = "estimated" if minimal_n(m) <= N_BUDGET else "analytic"
        out.append(make_omega(m, mode=mm, n_budget=N_BUDGET if mm == "estimated" else max(N_BUDGET, minimal_n(m)), **kw))
    return out


# ---------------------------------------------------------------------------
# continuous construction

PHI = cutoff_bump(1.0, 2.0)  # 1 on [-1, 1], 0 outside (-2, 2)
PHI_HAT_RANGE = 64.0
PHI_HAT_STEP = 1.0 / 256.0


@lru_cache(maxsize=None)
def phi_hat_table(S: float = PHI_HAT_RANGE, step: float = PHI_HAT_STEP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(s, FT phi(s), d/ds FT phi(s)) on [-S, S] (phi is real and even, so both are real)."""
    K = int(round(S / step))
    s, vals, _ = ft_smooth_grid(PHI, step, K)
    xphi = CompactFunction(lambda x: np.asarray(x) * PHI(x), PHI.support_radius)
    _, moment, _ = ft_smooth_grid(xphi, step, K)
    d = (-2j * math.pi * moment).real
    out = (s, vals.real.copy(), d)
    for v in out:
        v.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _phi_hat_antiderivatives() -> tuple[CubicHermiteSpline, CubicHermiteSpline]:
    """Hermite splines of int FT phi and int s FT phi, from -S."""
    s, f, df = phi_hat_table()
    h = s[1] - s[0]
    g, dg = s * f, f + s * df
    # corrected trapezoid: exact for cubics, matching the Hermite interpolant
    c0 = h / 2 * (f[:-1] + f[1:]) + h * h / 12 * (df[:-1] - df[1:])
    c1 = h / 2 * (g[:-1] + g[1:]) + h * h / 12 * (dg[:-1] - dg[1:])
    P0 = np.concatenate([[0.0], np.cumsum(c0)])
    P1 = np.concatenate([[0.0], np.cumsum(c1)])
    return CubicHermiteSpline(s, P0, f), CubicHermiteSpline(s, P1, g)


def _step_derivative_l1(k: int, points: int = 200001) -> float:
    t = np.linspace(0.0, 1.0, points)
    return float(_simpson_uniform(np.abs(smooth_step_jet(t, k)[k]), t[1] - t[0]))


@dataclass(frozen=True)
class PhiHatL1:
    upper: float
    core: float
    core_err: float
    tail: float


@lru_cache(maxsize=None)
def phi_hat_l1(S: float = PHI_HAT_RANGE) -> PhiHatL1:
    """Upper bound for ||FT phi||_1: Simpson core on [-S, S], its error estimate and a decay tail.

    Tail: |FT phi(s)| <= ||phi^(k)||_1 / (2 pi |s|)^k for k = 2, 3.
    """
    fine_step = 1.0 / 256.0
    full_s, full, _ = phi_hat_table(S, fine_step)
    vals = np.abs(full[full_s.size // 2:])
    fine = 2.0 * float(_simpson_uniform(vals, fine_step))
    coarse = 2.0 * float(_simpson_uniform(vals[::2], 2 * fine_step))
    err = abs(fine - coarse)
    d2 = 2.0 * _step_derivative_l1(2)  # two transition zones of unit width
    d3 = 2.0 * _step_derivative_l1(3)
    tail = min(d2 / (2.0 * math.pi**2 * S), d3 / (8.0 * math.pi**3 * S * S))
    return PhiHatL1(fine + err + tail, fine, err, tail)


def _frac_scaled(x: np.ndarray, k: int) -> np.ndarray:
    """Fractional part of x * 2^k, exactly (0 where the product is an integer)."""
    m, e = np.frexp(x)
    E = e.astype(np.int64) + k
    integer = E >= 53
    y = np.ldexp(m, np.clip(E, -1100, 60).astype(np.int32))
    return np.where(integer, 0.0, y - np.floor(y))


@dataclass(frozen=True)
class ContinuousG:
    """g = phi * a h(a .) / C with h = FT f_n * FT f; large parameters as exponents."""

    A: float
    C: float
    params: MassParameters
    a_exp: int
    window_l1: float  # certified lower bound of the integral of |h| over [-a, a]
    ft_sup: float = math.nan
    claims: tuple[Claim, ...] = ()
    notes: tuple[str, ...] = ()

    support_radius = 2.0

    @property
    def n_exp(self) -> int:
        return self.params.n_exp

    @property
    def l1_mass(self) -> float:
        return self.window_l1 / self.C

    @property
    def ft_bound(self) -> float:
        """Young-inequality bound ||FT phi||_1 sup|Tr| / C (C is itself the upper estimate)."""
        return phi_hat_l1().upper / self.C

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xf = x.reshape(-1)
        phi = PHI(xf)
        r = math.ldexp(1.0, self.a_exp - self.n_exp)
        frac = _frac_scaled(np.abs(xf), self.a_exp)
        nz = xf != 0
        safe = np.where(nz, xf, 1.0)
        fhat_part = np.where(nz, np.sign(xf) * np.sin(2.0 * math.pi * frac) / (math.pi * safe), 0.0)
        out = phi * fhat_part * sinc(2.0 * math.pi * xf * r) / self.C
        if (~nz).any():
            with np.errstate(over="ignore"):
                out = np.where(nz, out, np.ldexp(2.0 / self.C, min(self.a_exp, 2000)))
        out = out.reshape(x.shape)
        return out if out.ndim else float(out)

    # transform: FT g(t) = (1/C) int FT phi(s) Tr(t - s) ds where Tr is 1 between
    # two linear ramps of width w = 2a/n centred at t - a and t + a.

    @property
    def ramp_width(self) -> float:
        return math.ldexp(1.0, self.a_exp - self.n_exp + 1)

    def _plateau_integral(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """(1/C) int FT phi * Tr with ramps centred at ``left`` (rising) and ``right`` (falling)."""
        P0, P1 = _phi_hat_antiderivatives()
        S = float(P0.x[-1])
        w = self.ramp_width

        def seg(lo, hi):
            lo, hi = np.clip(lo, -S, S), np.clip(hi, -S, S)
            return P0(hi) - P0(lo), P1(hi) - P1(lo)

        flat, _ = seg(left + w / 2, right - w / 2)
        total = np.where(right - left > w, flat, 0.0)
        for c, sign in ((left, 1.0), (right, -1.0)):
            d0, d1 = seg(c - w / 2, c + w / 2)
            if w >= PHI_HAT_STEP:
                ramp = 0.5 * d0 + sign * (d1 - c * d0) / w
            else:
                # narrow ramp: midpoint expansion, int (s - c) FT phi ~ (FT phi)'(c) w^3 / 12
                inside = np.abs(c) < S
                ramp = 0.5 * d0 + sign * np.where(inside, P0(np.clip(c, -S, S), 2), 0.0) * w * w / 12.0
            total = total + ramp
        return total / self.C

    @property
    def _edge_mode(self) -> bool:
        return self.a_exp > 40

    def ft(self, t) -> np.ndarray:
        """FT g at finite t (real, even)."""
        t = np.abs(np.asarray(t, dtype=float)).reshape(-1)
        if self._edge_mode:
            a = math.ldexp(1.0, min(self.a_exp, 1023))
            return self.ft_edge(t - a)
        a = math.ldexp(1.0, self.a_exp)
        return self._plateau_integral(t - a, t + a)

    def ft_edge(self, tau) -> np.ndarray:
        """FT g(a + tau); the far ramp at a + tau + a lies beyond the table in edge mode."""
        tau = np.asarray(tau, dtype=float).reshape(-1)
        if self._edge_mode:
            return self._plateau_integral(tau, np.full_like(tau, np.inf))
        a = math.ldexp(1.0, self.a_exp)
        return self.ft(a + tau)

    def sample_ft_sup(self, step: float = 0.05) -> float:
        S = float(phi_hat_table()[0][-1])
        width = S + 2.0
        tau = np.arange(-width, width + step / 2, step)
        vals = [np.abs(self.ft(np.array([0.0])))[0], float(np.max(np.abs(self.ft_edge(tau))))]
        if self.a_exp <= DENSE_SWEEP_MAX_EXP:
            a = math.ldexp(1.0, self.a_exp)
            t = np.arange(0.0, a + width, step)
            vals.append(float(np.max(np.abs(self.ft(t)))))
        return float(max(vals))

    def as_compact(self) -> CompactFunction:
        return CompactFunction(lambda x: self(x), 2.0, 0.0, (), (-1.0, 1.0), True, f"g(A={self.A:g})")

    def report(self) -> dict:
        return {
            "A": self.A,
            "C": self.C,
            "mass_parameters": self.params.to_dict(),
            "a_exp": self.a_exp,
            "n_exp": self.n_exp,
            "l1_mass": self.l1_mass,
            "ft_sup": self.ft_sup,
            "ft_bound": self.ft_bound,
            "claims": [c.to_dict() for c in self.claims],
            "notes": list(self.notes),
        }


A_EXP_MIN = -8
DENSE_SWEEP_MAX_EXP = 6
MASS_MARGIN = 1.01


def construct_g(A: float, strict: bool = True) -> ContinuousG:
    """Pipeline: C, B = 1.01 A C, (alpha, n), smallest dyadic a, then g = phi a h(a .) / C."""
    if not A > 0:
        raise ValueError("A must be positive")
    C = phi_hat_l1().upper
    B = MASS_MARGIN * A * C
    params = find_mass_parameters(B)
    a_exp = first_true(lambda k: window_l1_lower(k, params.n_exp) > A * C, A_EXP_MIN, params.alpha_exp)
    W = window_l1_lower(a_exp, params.n_exp)
    g = ContinuousG(A, C, params, a_exp, W)
    ft_sup = g.sample_ft_sup()
    claims = [
        Claim("||g||_1 >= A (certified lower bound)", W / C, A, ">="),
        Claim("sup |FT g| sampled <= 1", ft_sup, 1.0, "<=", 1e-12),
        Claim("||FT phi||_1 / C <= 1", phi_hat_l1().upper / C, 1.0, "<=", 1e-15),
        Claim("n >= 2 alpha", params.n_exp, params.alpha_exp + 1, ">="),
    ]
    notes = []
    if a_exp + 2 < 1074 and A > 1:
        x = math.ldexp(0.75, -a_exp)
        claims.append(Claim("-g(0.75/a) > 0", -float(g(np.array([x]))[0]), 0.0, ">"))
    elif A > 1:
        notes.append("0.75/a underflows; negativity not sampled in double precision")
    require(claims, strict)
    return ContinuousG(A, C, params, a_exp, W, ft_sup, tuple(claims), tuple(notes))


@dataclass(frozen=True)
class ScaledG:
    """x -> g(gamma x) / beta."""

    base: ContinuousG
    n: int
    beta: float
    gamma: float
    claims: tuple[Claim, ...] = ()

    @property
    def support_radius(self) -> float:
        return self.base.support_radius / self.gamma

    @property
    def l1_mass(self) -> float:
        return self.base.l1_mass / (self.beta * self.gamma)

    @property
    def ft_sup(self) -> float:
        return self.base.ft_sup / (self.beta * self.gamma)

    @property
    def ft_bound(self) -> float:
        return self.base.ft_bound / (self.beta * self.gamma)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= self.support_radius
        v = np.where(inside, np.asarray(self.base(np.where(inside, self.gamma * x, 0.0))) / self.beta, 0.0)
        return v if v.ndim else float(v)

    def ft(self, t) -> np.ndarray:
        return self.base.ft(np.asarray(t, dtype=float) / self.gamma) / (self.beta * self.gamma)

    def report(self) -> dict:
        return {
            "n": self.n,
            "beta": self.beta,
            "gamma": self.gamma,
            "support_radius": self.support_radius,
            "l1_mass": self.l1_mass,
            "ft_sup": self.ft_sup,
            "base": self.base.report(),
            "claims": [c.to_dict() for c in self.claims],
        }


def g_n_parameters(n: int) -> tuple[float, float, float]:
    """(A, beta, gamma) with A = 2^n (n^2+1)^n, gamma = 2(n+1), beta = 2^(n-1)/(n+1)."""
    return float(2**n * (n * n + 1) ** n), 2.0 ** (n - 1) / (n + 1), 2.0 * (n + 1)


def make_g_n(n: int, strict: bool = True) -> ScaledG:
    if n < 1:
        raise ValueError("n must be >= 1")
    A, beta, gamma = g_n_parameters(n)
    g = construct_g(A, strict)
    sg = ScaledG(g, n, beta, gamma)
    claims = [
        Claim("||g_n||_1 >= (n^2+1)^n", sg.l1_mass, float((n * n + 1) ** n), ">="),
        Claim("sup |FT g_n| <= 2^-n", sg.ft_sup, 2.0**-n, "<=", 1e-12),
        Claim("support radius <= 1/(n+1)", sg.support_radius, 1.0 / (n + 1), "<=", 1e-15),
    ]
    require(claims, strict)
    return ScaledG(g, n, beta, gamma, tuple(claims))


def _second_derivative_l1(F, lo: float, hi: float, points: int = 40001) -> float:
    z = np.linspace(lo, hi, points)
    h = z[1] - z[0]
    y = np.asarray(F(z), dtype=float)
    d2 = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / (h * h)
    return float(np.sum(np.abs(d2)) * h)


def density_pairing(sg: ScaledG):
    """Pairing int F(x) g_n(x) dx = F(0)/(beta gamma C) up to ||G''||_1 / (2 pi^2 a (1 - 1/n) beta gamma C)."""
    g = sg.base
    bg = sg.beta * sg.gamma

    def pair(F) -> tuple[float, float]:
        G = lambda z: np.asarray(F(z / sg.gamma), dtype=float) * PHI(z)
        value = float(np.asarray(F(np.array([0.0]))).reshape(-1)[0]) / (bg * g.C)
        k2 = 1.1 * _second_derivative_l1(G, -2.0, 2.0)
        denom = 2.0 * math.pi**2 * bg * g.C * (1.0 - math.ldexp(1.0, -g.n_exp))
        err = math.ldexp(k2 / denom, -min(g.a_exp, 5000)) if g.a_exp >= 0 else k2 / denom * math.ldexp(1.0, -g.a_exp)
        return value, err

    return pair


@lru_cache(maxsize=None)
def _g_n_cached(j: int) -> ScaledG:
    return make_g_n(j)


def continuous_counterexample(N: int) -> BlockMeasure:
    """Density blocks g_j(x + j) for j = 1..N (shift -j, radius 1/(j+1))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    blocks = []
    for j in range(1, N + 1):
        sg = _g_n_cached(j)
        blocks.append((np.array([-float(j)]), DensityBlock(
            density=sg,
            radius=sg.support_radius,
            l1=sg.l1_mass,
            l1_is_lower=True,
            symmetric=True,
            pair=density_pairing(sg),
            label=f"g_{j}",
        )))
    return BlockMeasure(tuple(blocks), 0.5, np.array([-1.0]), tuple(f"g_{j}" for j in range(1, N + 1)))


def pair_blocks(mu: BlockMeasure, test: CompactFunction) -> tuple[float, float, tuple[int, ...]]:
    """Pair a block measure of density blocks with a compactly supported test function."""
    lo, hi = test.support
    total, err, touched = [], 0.0, []
    for i, ((blo, bhi), (s, p)) in enumerate(zip(mu.block_boxes(), mu.blocks)):
        if bhi[0] < lo or blo[0] > hi:
            continue
        if not isinstance(p, DensityBlock) or p.pair is None:
            raise TypeError("block without a pairing rule")
        shift = float(s[0])
        v, e = p.pair(lambda x, shift=shift: test(np.asarray(x) + shift))
        total.append(v)
        err += e
        touched.append(i + 1)
    return math.fsum(total), err, tuple(touched)
