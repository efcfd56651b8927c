"""sinc transforms of box functions and windowed L1 integrals of their products.

With f = 1_[-1,1] and f_n = (n/2) 1_[-1/n,1/n]:

    FT f(t)   = 2 sinc(2 pi t)
    FT f_n(t) = sinc(2 pi t / n)

The windowed integral of |FT f| grows like (4/pi^2) ln(alpha).  For the
windows needed by the continuous construction alpha is astronomically large,
so every large parameter is a power of two held as an integer exponent and
the integral is bounded from below through a digamma closed form instead of
being integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

_TAYLOR_CUT = 1e-4
_LN2 = math.log(2.0)


def sinc(z):
    """sin(z)/z, Taylor series below |z| = 1e-4."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _TAYLOR_CUT
    safe = np.where(small, 1.0, z)
    z2 = z * z
    out = np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def sinc_ft(kind: str, t, n: int | None = None):
    """Closed-form transform of f ("f") or f_n ("f_n")."""
    t = np.asarray(t, dtype=float)
    if kind == "f":
        return 2.0 * sinc(2.0 * math.pi * t)
    if kind == "f_n":
        if n is None or n < 1:
            raise ValueError("f_n needs an integer n >= 1")
        return sinc(2.0 * math.pi * t / n)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# direct quadrature


def _simpson_cells(func, edges: np.ndarray, panels: int):
    """Composite Simpson on each [edges[i], edges[i+1]]; returns (sum, error estimate).

    The error estimate compares against the half-resolution rule (Richardson).
    """
    if panels % 2:
        panels += 1
    lo, hi = edges[:-1], edges[1:]
    u = np.linspace(0.0, 1.0, panels + 1)
    x = lo[:, None] + (hi - lo)[:, None] * u[None, :]
    y = func(x)
    h = (hi - lo) / panels
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    fine = h / 3.0 * (y @ w)
    yc = y[:, ::2]
    wc = np.ones(panels // 2 + 1)
    if panels // 2 >= 2:
        wc[1:-1:2] = 4.0
        wc[2:-1:2] = 2.0
        coarse = 2 * h / 3.0 * (yc @ wc)
    else:
        coarse = h * (yc[:, 0] + yc[:, -1])
    return math.fsum(fine), math.fsum(np.abs(fine - coarse)) / 15.0


def _zero_edges(alpha: float, period_spacings) -> np.ndarray:
    """Breakpoints in [0, alpha] at multiples of every spacing in ``period_spacings``."""
    pts = [np.array([0.0, alpha])]
    for s in period_spacings:
        k = int(math.floor(alpha / s))
        if k > 0:
            pts.append(s * np.arange(1, k + 1, dtype=float))
    e = np.unique(np.concatenate(pts))
    return e[e <= alpha]


MAX_QUAD_POINTS = 10**7


def sinc_l1_window(n: int | None, alpha: float, quad_step: float = 0.01) -> tuple[float, float]:
    """Integral of |FT f_n * FT f| over [-alpha, alpha] (n=None drops the f_n factor).

    Composite Simpson split at the zeros k/2 and k n/2; returns (value, error estimate).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    spacings = [0.5] if n is None else [0.5, n / 2.0]
    edges = _zero_edges(alpha, spacings)
    panels = max(8, 2 * math.ceil(0.5 / quad_step / 2) * 2)
    if (len(edges) - 1) * (panels + 1) > MAX_QUAD_POINTS:
        raise ValueError("quadrature point budget exceeded; use the closed-form bound")
    if n is None:
        fn = lambda x: np.abs(sinc_ft("f", x))
    else:
        fn = lambda x: np.abs(sinc_ft("f_n", x, n) * sinc_ft("f", x))
    val, err = _simpson_cells(fn, edges, panels)
    return 2.0 * val, 2.0 * err


def fhat_half_integral(K: int, panels: int = 64) -> tuple[float, float]:
    """Integral of |FT f| over [0, K/2] by Simpson on the K half-period cells."""
    edges = 0.5 * np.arange(K + 1, dtype=float)
    return _simpson_cells(lambda x: np.abs(sinc_ft("f", x)), edges, panels)


# ---------------------------------------------------------------------------
# closed form through the digamma function
#
# On the cell [k/2, (k+1)/2] substitute t = (k+s)/2; summing the cells gives
#   int_0^{K/2} |FT f| = (1/pi) int_0^1 sin(pi s) [psi(K+s) - psi(s)] ds.


@lru_cache(maxsize=None)
def _sin_psi_moment() -> tuple[float, float]:
    # psi(s) = psi(1+s) - 1/s removes the pole at 0
    val, err = integrate.quad(
        lambda s: math.sin(math.pi * s) * special.digamma(1.0 + s) - float(sinc(math.pi * s)) * math.pi,
        0.0, 1.0, epsabs=1e-13, epsrel=1e-13,
    )
    return val, err


def fhat_half_integral_exact(K: int) -> float:
    """Closed-form value of the integral of |FT f| over [0, K/2] (moderate K)."""
    j0, _ = _sin_psi_moment()
    top, _ = integrate.quad(lambda s: math.sin(math.pi * s) * special.digamma(K + s), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return (top - j0) / math.pi


def _psi_lower_pow2(k_exp: int) -> float:
    """Lower bound for psi(2**k_exp), k_exp >= 0."""
    if k_exp <= 40:
        return float(special.digamma(2.0**k_exp)) - 1e-15 * max(1.0, k_exp)
    # psi(x) > ln x - 1/x; the 1/x term is far below double resolution here
    return k_exp * _LN2 * (1.0 - 1e-15)


def fhat_half_lower_pow2(k_exp: int) -> float:
    """Certified lower bound of int_0^{K/2} |FT f| for K = 2**k_exp half-periods."""
    if k_exp < 0:
        raise ValueError("need at least one full cell")
    j0, jerr = _sin_psi_moment()
    # psi is increasing, so psi(K+s) >= psi(K) on [0, 1]
    val = (2.0 / math.pi * _psi_lower_pow2(k_exp) - j0 - jerr) / math.pi
    return val * (1.0 - 1e-13)


DIRECT_EXP_MAX = 10


def fhat_l1_lower(alpha_exp: int) -> float:
    """Lower bound for the integral of |FT f| over [-alpha, alpha], alpha = 2**alpha_exp."""
    if alpha_exp <= DIRECT_EXP_MAX:
        val, err = sinc_l1_window(None, math.ldexp(1.0, alpha_exp), quad_step=0.005)
        return val - err - 1e-13
    return 2.0 * fhat_half_lower_pow2(alpha_exp + 1)


def min_sinc_factor(a_exp: int, n_exp: int) -> float:
    """min of FT f_n over [0, a] when n >= 2a, i.e. sinc(2 pi a / n)."""
    if n_exp < a_exp + 1:
        raise ValueError("needs n >= 2a so that FT f_n stays positive and decreasing")
    return float(sinc(2.0 * math.pi * math.ldexp(1.0, a_exp - n_exp)))


def window_l1_lower(a_exp: int, n_exp: int) -> float:
    """Lower bound for the integral of |FT f_n FT f| over [-a, a] (a = 2**a_exp, n = 2**n_exp)."""
    return min_sinc_factor(a_exp, n_exp) * fhat_l1_lower(a_exp)


# ---------------------------------------------------------------------------
# parameter search


@dataclass(frozen=True)
class MassParameters:
    alpha_exp: int
    n_exp: int
    fhat_l1: float  # lower bound of the window integral of |FT f| over [-alpha, alpha]
    window_l1: float  # lower bound of the same for |FT f_n FT f|
    target: float

    @property
    def alpha(self) -> float:
        return math.ldexp(1.0, self.alpha_exp) if self.alpha_exp < 1024 else math.inf

    @property
    def n(self) -> int:
        return 1 << self.n_exp

    def to_dict(self) -> dict:
        return {
            "alpha_exp": self.alpha_exp,
            "n_exp": self.n_exp,
            "fhat_l1_lower": self.fhat_l1,
            "window_l1_lower": self.window_l1,
            "target": self.target,
        }


class SearchCapReached(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def first_true(pred, lo: int, cap: int) -> int:
    """Smallest integer k in [lo, cap] with pred(k), assuming pred is monotone."""
    if pred(lo):
        return lo
    step = 1
    prev = lo
    k = lo + 1
    while not pred(k):
        prev = k
        step *= 2
        k = lo + step
        if k > cap:
            if pred(cap):
                k = cap
                break
            raise SearchCapReached(f"no exponent up to {cap} qualifies", best=prev)
    lo_, hi_ = prev, k  # pred(lo_) false, pred(hi_) true
    while hi_ - lo_ > 1:
        mid = (lo_ + hi_) // 2
        if pred(mid):
            hi_ = mid
        else:
            lo_ = mid
    return hi_


ALPHA_EXP_MIN = -8
EXP_CAP = 1 << 62


def find_mass_parameters(B: float, alpha_exp_min: int = ALPHA_EXP_MIN, cap: int = EXP_CAP) -> MassParameters:
    """Dyadic alpha with window integral of |FT f| above 2B, then dyadic n reaching B."""
    if not B > 0:
        raise ValueError("B must be positive")
    alpha_exp = first_true(lambda k: fhat_l1_lower(k) > 2.0 * B, alpha_exp_min, cap)
    L = fhat_l1_lower(alpha_exp)
    n_exp = first_true(
        lambda k: min_sinc_factor(alpha_exp, k) * L > B,
        max(0, alpha_exp + 1),
        cap,
    )
    W = min_sinc_factor(alpha_exp, n_exp) * L
    return MassParameters(alpha_exp, n_exp, L, W, B)
