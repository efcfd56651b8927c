"""Smooth test functions: the exp-based smooth step, bumps, the plateau function
built from shells (k_n, c_n), seminorm estimates, the Leibniz product bound
and separating functions for uniformly discrete point sets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .fourier import CompactFunction

K_MAX = 3
FD_STEP = 1e-5
_RHO_CUT = 1e-3  # exp(-1/t) and all its derivatives are 0.0 in double below this


# ---------------------------------------------------------------------------
# truncated Taylor arithmetic; c[k] = f^(k)(t) / k!


def _jmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    for k in range(a.shape[0]):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def _jrecip(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        s = np.zeros_like(a[0])
        for i in range(1, k + 1):
            s += a[i] * out[k - i]
        out[k] = -s * out[0]
    return out


def _jexp(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        s = np.zeros_like(a[0])
        for i in range(1, k + 1):
            s += i * a[i] * out[k - i]
        out[k] = s / k
    return out


def _rho_jet(u: np.ndarray, slope: float, K: int) -> np.ndarray:
    """Taylor jet of exp(-1/u(t)) for u affine in t with du/dt = slope."""
    jet = np.zeros((K + 1,) + u.shape)
    live = u > _RHO_CUT
    if not live.any():
        return jet
    x = np.zeros((K + 1, int(live.sum())))
    x[0] = u[live]
    if K >= 1:
        x[1] = slope
    jet[:, live] = _jexp(-_jrecip(x))
    return jet


def smooth_step_jet(t, K: int = K_MAX) -> np.ndarray:
    """Derivatives S^(k)(t), k = 0..K, of S(t) = rho(t) / (rho(t) + rho(1 - t)).

    Returned with shape (K + 1,) + t.shape.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros((K + 1,) + t.shape)
    out[0] = np.where(t >= 1.0, 1.0, 0.0)
    mid = (t > 0.0) & (t < 1.0)
    if mid.any():
        tm = t[mid]
        r1 = _rho_jet(tm, 1.0, K)
        r2 = _rho_jet(1.0 - tm, -1.0, K)
        taylor = _jmul(r1, _jrecip(r1 + r2))
        fact = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
        out[:, mid] = taylor * fact.reshape((-1,) + (1,) * tm.ndim)
    return out


def smooth_step(t):
    v = smooth_step_jet(t, 0)[0]
    return v if v.ndim else float(v)


@lru_cache(maxsize=None)
def step_derivative_sups(K: int = K_MAX, points: int = 200001) -> tuple[float, ...]:
    """max |S^(k)| over [0, 1], k = 0..K, from a dense grid (includes t = 1/2)."""
    t = np.linspace(0.0, 1.0, points)
    jet = smooth_step_jet(t, K)
    return tuple(float(np.max(np.abs(jet[k]))) for k in range(K + 1))


# ---------------------------------------------------------------------------
# multi-indices


def multi_index(alpha, d: int = 1) -> tuple[int, ...]:
    if isinstance(alpha, (int, np.integer)):
        if d != 1:
            raise ValueError("integer multi-index only in one dimension")
        alpha = (int(alpha),)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d or any(a < 0 for a in alpha):
        raise ValueError(f"invalid multi-index {alpha} for d={d}")
    return alpha


def mi_order(alpha) -> int:
    return sum(alpha)


def mi_leq(gamma, alpha) -> bool:
    return all(g <= a for g, a in zip(gamma, alpha))


def mi_binom(alpha, gamma) -> int:
    return math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))


def mi_below(alpha):
    """All gamma <= alpha componentwise."""
    return [tuple(g) for g in itertools.product(*(range(a + 1) for a in alpha))]


def mi_sub(alpha, gamma) -> tuple[int, ...]:
    return tuple(a - g for a, g in zip(alpha, gamma))


def all_multi_indices(d: int, max_order: int):
    return [a for a in itertools.product(range(max_order + 1), repeat=d) if sum(a) <= max_order]


# ---------------------------------------------------------------------------
# test functions


def _fd_stencil(k: int):
    return [((k / 2.0 - j), (-1) ** j * math.comb(k, j)) for j in range(k + 1)]


def _fd_derivative(f: Callable, alpha: tuple, x: np.ndarray, h: float) -> np.ndarray:
    """Tensor-product central differences of order alpha at points x (shape (N, d))."""
    d = x.shape[1]
    stencils = [_fd_stencil(a) for a in alpha]
    out = np.zeros(x.shape[0])
    for combo in itertools.product(*stencils):
        shift = np.array([c[0] for c in combo]) * h
        coef = math.prod(c[1] for c in combo)
        out += coef * f(x + shift[None, :d])
    return out / h ** sum(alpha)


class SmoothTestFunction:
    """A smooth real function on R^d with derivatives up to order K_MAX.

    ``deriv`` (if given) maps (alpha, points) to exact derivative values;
    otherwise central differences with one Richardson level are used.
    """

    def __init__(
        self,
        dim: int,
        value: Callable,
        deriv: Callable | None = None,
        support_radius: float | None = None,
        center=None,
        label: str = "",
        fd_step: float = FD_STEP,
    ):
        self.dim = dim
        self._value = value
        self._deriv = deriv
        self.support_radius = support_radius
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=float).reshape(dim)
        self.label = label
        self.fd_step = fd_step

    @property
    def method(self) -> str:
        return "exact-derivative" if self._deriv is not None else "finite-difference"

    def _points(self, x) -> tuple[np.ndarray, tuple]:
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            shape = x.shape[:-1] if (x.ndim > 1 and x.shape[-1] == 1) else x.shape
            return x.reshape(-1, 1), shape
        return x.reshape(-1, self.dim), x.shape[:-1]

    def __call__(self, x):
        pts, shape = self._points(x)
        v = np.asarray(self._value(pts), dtype=float).reshape(shape)
        return v if v.ndim else float(v)

    def derivative(self, alpha, x):
        alpha = multi_index(alpha, self.dim)
        if mi_order(alpha) > K_MAX:
            raise ValueError(f"derivative order above {K_MAX}")
        pts, shape = self._points(x)
        if mi_order(alpha) == 0:
            v = self._value(pts)
        elif self._deriv is not None:
            v = self._deriv(alpha, pts)
        else:
            k = mi_order(alpha)
            h = self.fd_step * 10.0 ** (k - 1)
            coarse = _fd_derivative(self._value, alpha, pts, h)
            fine = _fd_derivative(self._value, alpha, pts, h / 2.0)
            v = (4.0 * fine - coarse) / 3.0
        v = np.asarray(v, dtype=float).reshape(shape)
        return v if v.ndim else float(v)

    def as_compact(self) -> CompactFunction:
        """One-dimensional view usable by the quadrature routines."""
        if self.dim != 1 or self.support_radius is None:
            raise ValueError("needs a 1-D function with bounded support")
        derivs = tuple((lambda x, k=k: self.derivative(k, np.asarray(x))) for k in (1, 2, 3))
        return CompactFunction(lambda x: self(np.asarray(x)), self.support_radius, float(self.center[0]), derivs, label=self.label)


def _radial_1d(profile_jet: Callable, center: float = 0.0):
    """value/derivative pair for x -> sigma(|x - center|) on the line."""

    def value(p):
        return profile_jet(np.abs(p[:, 0] - center), 0)[0]

    def deriv(alpha, p):
        k = alpha[0]
        y = p[:, 0] - center
        return np.sign(y) ** k * profile_jet(np.abs(y), k)[k]

    return value, deriv


def _annulus_profile_jet(r: np.ndarray, K: int) -> np.ndarray:
    """Derivatives in r of sigma(r) = S((r - 2)/2) * S((32 - r)/16)."""
    a = smooth_step_jet((r - 2.0) / 2.0, K)
    b = smooth_step_jet((32.0 - r) / 16.0, K)
    out = np.zeros_like(a)
    for k in range(K + 1):
        a[k] *= 0.5**k
        b[k] *= (-1.0 / 16.0) ** k
    for k in range(K + 1):
        for i in range(k + 1):
            out[k] += math.comb(k, i) * a[i] * b[k - i]
    return out


ANNULUS_INNER, ANNULUS_OUTER = 2.0, 32.0


def annular_bump(d: int = 1) -> SmoothTestFunction:
    """sigma(|x|): 1 on 4 <= |x| <= 16, 0 outside 2 < |x| < 32, values in [0, 1]."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if d == 1:
        value, deriv = _radial_1d(_annulus_profile_jet)
        return SmoothTestFunction(1, value, deriv, ANNULUS_OUTER, label="annular bump")
    value = lambda p: _annulus_profile_jet(np.linalg.norm(p, axis=1), 0)[0]
    return SmoothTestFunction(d, value, None, ANNULUS_OUTER, label="annular bump")


def cutoff_bump(inner: float = 1.0, outer: float = 2.0, center: float = 0.0) -> CompactFunction:
    """x -> S((outer - |x - center|) / (outer - inner)): 1 near the centre, 0 beyond ``outer``."""
    if not 0 <= inner < outer:
        raise ValueError("need 0 <= inner < outer")
    w = outer - inner

    def jet(y, K):
        return smooth_step_jet((outer - np.abs(y - center)) / w, K)

    def deriv(k):
        def f(x):
            x = np.asarray(x, dtype=float)
            return jet(x, k)[k] * (-np.sign(x - center) / w) ** k
        return f

    return CompactFunction(
        lambda x: jet(np.asarray(x, dtype=float), 0)[0],
        outer,
        center,
        (deriv(1), deriv(2), deriv(3)),
        (center - inner, center + inner),
        even=center == 0.0,
        label=f"cutoff[{inner:g},{outer:g}]",
    )


# ---------------------------------------------------------------------------
# plateau function


class PlateauSchwartz:
    """psi = sum_n c_n * phi(x / 2^(k_n - 3)) for a finite list of shells."""

    def __init__(self, k: Sequence[int], c: Sequence[float], dim: int = 1, base: SmoothTestFunction | None = None):
        k = tuple(int(v) for v in k)
        c = tuple(float(v) for v in c)
        if len(k) != len(c) or not k:
            raise ValueError("k and c must be non-empty and of equal length")
        if k[0] < 4:
            raise ValueError("first shell index must be at least 4")
        if any(b < a + 4 for a, b in zip(k, k[1:])):
            raise ValueError("shell indices need gaps of at least 4")
        if any(not (v > 0 and math.isfinite(v)) for v in c):
            raise ValueError("coefficients must be positive and finite")
        self.k = k
        self.c = c
        self.dim = dim
        self.base = base if base is not None else annular_bump(dim)
        self._karr = np.asarray(k)

    def __len__(self):
        return len(self.k)

    def to_dict(self) -> dict:
        return {"k": list(self.k), "c": list(self.c), "dim": self.dim}

    @classmethod
    def from_dict(cls, data: dict) -> "PlateauSchwartz":
        return cls(data["k"], data["c"], int(data.get("dim", 1)))

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            shape = x.shape[:-1] if (x.ndim > 1 and x.shape[-1] == 1) else x.shape
            return x.reshape(-1, 1), shape
        return x.reshape(-1, self.dim), x.shape[:-1]

    def shell_index(self, x) -> np.ndarray:
        """Index n of the shell whose open support 2^(k_n-2) < |x| < 2^(k_n+2) holds x, or -1."""
        pts, shape = self._points(x)
        r = np.linalg.norm(pts, axis=1)
        _, e = np.frexp(r)  # 2^(e-1) <= r < 2^e
        idx = np.searchsorted(self._karr, e - 2, side="left")
        ok = idx < len(self.k)
        kk = np.where(ok, self._karr[np.minimum(idx, len(self.k) - 1)], 0)
        ok &= (r > np.ldexp(1.0, kk - 2)) & (r < np.ldexp(1.0, kk + 2)) & (r > 0)
        return np.where(ok, idx, -1).reshape(shape)

    def __call__(self, x):
        return self.derivative((0,) * self.dim, x)

    def derivative(self, alpha, x):
        alpha = multi_index(alpha, self.dim)
        pts, shape = self._points(x)
        n = self.shell_index(pts).reshape(-1)
        out = np.zeros(pts.shape[0])
        for j in np.unique(n[n >= 0]):
            sel = n == j
            s = self.k[j] - 3
            y = np.ldexp(pts[sel], -s)
            out[sel] = self.c[j] * math.ldexp(1.0, -s * mi_order(alpha)) * np.asarray(self.base.derivative(alpha, y)).reshape(-1)
        out = out.reshape(shape)
        return out if out.ndim else float(out)

    def seminorm_constant(self, alpha, beta) -> float:
        """C_{alpha,beta} = max_n c_n 2^((k_n - 3)(|beta| - |alpha|))."""
        p = mi_order(multi_index(beta, self.dim)) - mi_order(multi_index(alpha, self.dim))
        return max(c * 2.0 ** ((k - 3) * p) for k, c in zip(self.k, self.c))

    def decay_check(self, max_power: int = 8) -> dict:
        """c_n 2^((k_n - 3) N') over the stored shells, N' = 0..max_power."""
        rows = {}
        for p in range(max_power + 1):
            seq = [math.log2(c) + (k - 3) * p for k, c in zip(self.k, self.c)]
            rows[p] = {"max_log2": max(seq), "last_log2": seq[-1], "tail_decreasing": len(seq) < 2 or seq[-1] <= seq[-2]}
        return rows


# ---------------------------------------------------------------------------
# seminorms


@dataclass(frozen=True)
class SeminormEstimate:
    alpha: tuple
    beta: tuple
    value: float
    grid: str
    method: str
    argmax: tuple = ()

    def row(self) -> str:
        a = "-".join(map(str, self.alpha))
        b = "-".join(map(str, self.beta))
        return f"{a},{b},{self.value:.17g},{self.method}"


def radial_grid(lo: float = ANNULUS_INNER, hi: float = ANNULUS_OUTER, points: int = 6001) -> np.ndarray:
    """Symmetric 1-D sample of +-[lo, hi]."""
    r = np.linspace(lo, hi, points)
    return np.concatenate([-r[::-1], r])


def _weight(x: np.ndarray, beta: tuple) -> np.ndarray:
    return np.prod(x ** np.asarray(beta, dtype=float)[None, :], axis=1)


def seminorm_estimate(f, alpha, beta, grid=None) -> SeminormEstimate:
    """max over the grid of |x^beta D^alpha f(x)| -- a lower estimate of the seminorm.

    For a plateau function the grid is a sample of the base bump's support,
    rescaled into each shell (the function is exactly zero elsewhere).
    """
    d = f.dim
    alpha = multi_index(alpha, d)
    beta = multi_index(beta, d)
    if mi_order(alpha) > K_MAX:
        raise ValueError(f"derivative order above {K_MAX}")
    if isinstance(f, PlateauSchwartz):
        if d != 1:
            raise ValueError("plateau seminorms sampled on the line only")
        y = radial_grid() if grid is None else np.asarray(grid, dtype=float).reshape(-1)
        best, arg = 0.0, ()
        for k in f.k:
            x = np.ldexp(y, k - 3).reshape(-1, 1)
            v = np.abs(_weight(x, beta) * np.asarray(f.derivative(alpha, x)).reshape(-1))
            i = int(np.argmax(v))
            if v[i] > best:
                best, arg = float(v[i]), (float(x[i, 0]),)
        return SeminormEstimate(alpha, beta, best, f"shells {list(f.k)}, {y.size} base samples", f.base.method, arg)
    if grid is None:
        if f.support_radius is None:
            raise ValueError("grid needed for functions without a support radius")
        if d == 1:
            grid = np.linspace(-f.support_radius, f.support_radius, 20001)
        else:
            ax = np.linspace(-f.support_radius, f.support_radius, 201)
            grid = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    pts = np.asarray(grid, dtype=float).reshape(-1, d)
    v = np.abs(_weight(pts, beta) * np.asarray(f.derivative(alpha, pts)).reshape(-1))
    if v.size == 0:
        return SeminormEstimate(alpha, beta, 0.0, "empty", f.method)
    i = int(np.argmax(v))
    return SeminormEstimate(alpha, beta, float(v[i]), f"{pts.shape[0]} points", f.method, tuple(map(float, pts[i])))


def leibniz_product_bound(f_derivative_sups: dict, phi_seminorms: dict, alpha, beta) -> float:
    """sum_{gamma <= alpha} binom(alpha, gamma) ||D^gamma f||_inf ||phi||_{alpha - gamma, beta}.

    ``phi_seminorms`` is keyed by (derivative multi-index, weight multi-index).
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    total = []
    for gamma in mi_below(alpha):
        try:
            fs = f_derivative_sups[gamma]
            ps = phi_seminorms[(mi_sub(alpha, gamma), beta)]
        except KeyError as exc:
            raise ValueError(f"missing entry for gamma={gamma}") from exc
        total.append(mi_binom(alpha, gamma) * fs * ps)
    return math.fsum(total)


# ---------------------------------------------------------------------------
# reciprocal coefficients


class InsufficientGrowth(ValueError):
    """No qualifying shell indices inside the profiled range."""


def reciprocal_coefficients(masses: Sequence[float], n_max: int | None = None, k_min: int = 5, gap: int = 5):
    """Pick k_1 < k_2 < ... with m_{k_j} > 2^(j k_j) and gaps >= ``gap``; c_j = 1/m_{k_j}."""
    if hasattr(masses, "masses"):
        masses = masses.masses
    m = list(masses)
    ks, cs = [], []
    j = 1
    start = k_min
    for k in range(start, len(m)):
        if n_max is not None and len(ks) >= n_max:
            break
        if ks and k < ks[-1] + gap:
            continue
        if m[k] > 0 and math.log2(m[k]) > j * k:
            ks.append(k)
            cs.append(1.0 / m[k])
            j += 1
    if not ks:
        raise InsufficientGrowth("insufficient growth at this truncation")
    return tuple(ks), tuple(cs)


# ---------------------------------------------------------------------------
# separation


class SeparationFunction(SmoothTestFunction):
    """sum_{u in U} phi_r(x - u) with phi_r(x) = S(2(1 - |x|/r)), r = half the minimal gap."""

    def __init__(self, U: np.ndarray, V: np.ndarray, r: float):
        self.U = U
        self.V = V
        self.r = r
        d = U.shape[1] if U.size else V.shape[1]
        self._tree = cKDTree(U) if len(U) else None
        super().__init__(d, self._eval, self._deriv_exact if d == 1 else None, label="separation")

    def _nearest(self, p):
        dist, idx = self._tree.query(p)
        return dist, idx

    def _eval(self, p):
        if self._tree is None:
            return np.zeros(p.shape[0])
        dist, _ = self._nearest(p)
        return smooth_step(2.0 * (1.0 - dist / self.r)) * np.ones(p.shape[0])

    def _deriv_exact(self, alpha, p):
        if self._tree is None:
            return np.zeros(p.shape[0])
        k = alpha[0]
        dist, idx = self._nearest(p)
        y = p[:, 0] - self.U[idx, 0]
        jet = smooth_step_jet(2.0 * (1.0 - dist / self.r), k)
        return jet[k] * (-2.0 * np.sign(y) / self.r) ** k

    def derivative_bound(self, k: int = 1) -> float:
        """sup |D^k phi_r| (direction-wise); disjoint supports make it the bound for f too."""
        return step_derivative_sups()[k] * (2.0 / self.r) ** k


class NotUniformlyDiscrete(ValueError):
    pass


def separation_function(U, V, dim: int | None = None) -> SeparationFunction:
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if dim is None:
        dim = U.shape[1] if U.ndim == 2 and U.size else (V.shape[1] if V.ndim == 2 and V.size else 1)
    U = U.reshape(-1, dim)
    V = V.reshape(-1, dim)
    allp = np.vstack([U, V])
    if len(allp) >= 2:
        dist, _ = cKDTree(allp).query(allp, k=2)
        gap = float(dist[:, 1].min())
        if not gap > 0:
            raise NotUniformlyDiscrete("points coincide; no positive separation radius")
        r = gap / 2.0
    else:
        r = 1.0
    return SeparationFunction(U, V, r)
