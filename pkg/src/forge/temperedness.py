"""Dyadic growth diagnostics for measures: annulus profiles, polynomial growth
tests, weighted-integral partial sums and divergent pairings against plateau
functions.

Annuli are half-open: A_0 = {|x| < 1}, A_j = {2^(j-1) <= |x| < 2^j}.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .atomic import (
    DEFAULT_ATOM_BUDGET,
    AtomicMeasure,
    BlockMeasure,
    DensityBlock,
    ProductMeasure,
    Window,
    restrict,
    total_variation,
    translate,
    variation,
)
from .schwartz import PlateauSchwartz

ANNULUS_CONVENTION = "A0=[0,1), Aj=[2^(j-1),2^j)"


@dataclass(frozen=True)
class DyadicProfile:
    masses: tuple[float, ...]
    convention: str = ANNULUS_CONVENTION
    source: str = ""
    lower_bounds: bool = False  # masses are certified lower bounds only

    @property
    def J(self) -> int:
        return len(self.masses) - 1

    def __len__(self):
        return len(self.masses)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "mass"])
            for j, m in enumerate(self.masses):
                w.writerow([j, f"{m:.17g}"])

    def to_dict(self) -> dict:
        return {"masses": list(self.masses), "convention": self.convention, "source": self.source, "lower_bounds": self.lower_bounds}


def annulus_index(r) -> np.ndarray:
    """j with r in A_j (exact, via the binary exponent)."""
    r = np.asarray(r, dtype=float)
    _, e = np.frexp(r)  # 2^(e-1) <= r < 2^e
    return np.where(r < 1.0, 0, e)


def _atomic_profile(mu: AtomicMeasure, J: int) -> np.ndarray:
    r = np.linalg.norm(mu.positions, axis=1)
    j = annulus_index(r)
    keep = j <= J
    out = np.zeros(J + 1)
    w = np.abs(mu.weights[keep])
    for jj in np.unique(j[keep]):
        out[jj] = math.fsum(w[j[keep] == jj])
    return out


def _radial_range(lo: np.ndarray, hi: np.ndarray) -> tuple[float, float]:
    """min and max of |x| over the box [lo, hi]."""
    nearest = np.clip(0.0, lo, hi)
    farthest = np.maximum(np.abs(lo), np.abs(hi))
    return float(np.linalg.norm(nearest)), float(np.linalg.norm(farthest))


def dyadic_profile(mu, J: int, budget: int = DEFAULT_ATOM_BUDGET) -> DyadicProfile:
    """Masses of |mu| per annulus for j = 0..J (radius >= 2^J is dropped)."""
    if J < 0:
        raise ValueError("J must be non-negative")
    if isinstance(mu, AtomicMeasure):
        return DyadicProfile(tuple(float(v) for v in _atomic_profile(mu, J)), source="atomic")
    if isinstance(mu, ProductMeasure):
        return DyadicProfile(tuple(float(v) for v in _atomic_profile(mu.enumerate(budget), J)), source="product")
    if not isinstance(mu, BlockMeasure):
        raise TypeError(f"no profile for {type(mu).__name__}")
    parts = [[] for _ in range(J + 1)]
    lower = False
    for (lo, hi), (s, p) in zip(mu.block_boxes(), mu.blocks):
        rmin, rmax = _radial_range(lo, hi)
        j0, j1 = int(annulus_index(rmin)), int(annulus_index(rmax))
        if isinstance(p, DensityBlock):
            lower |= p.l1_is_lower
        if j0 > J:
            continue
        if j0 == j1 and j1 <= J:
            parts[j0].append(total_variation(p, budget))
            continue
        if isinstance(p, DensityBlock):
            # a symmetric density straddling exactly one boundary at its centre splits in half
            centre = float(np.linalg.norm(s))
            if p.symmetric and j1 == j0 + 1 and centre == math.ldexp(1.0, j0) and s.shape[0] == 1:
                parts[j0].append(0.5 * p.l1)
                if j1 <= J:
                    parts[j1].append(0.5 * p.l1)
                continue
            raise ValueError("density block straddles an annulus boundary off-centre")
        atomic = p if isinstance(p, AtomicMeasure) else p.enumerate(budget)
        sub = _atomic_profile(translate(atomic, s), J)
        for j in range(J + 1):
            if sub[j]:
                parts[j].append(float(sub[j]))
    masses = tuple(math.fsum(v) for v in parts)
    return DyadicProfile(masses, source="blocks", lower_bounds=lower)


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # "poly_bounded" or "superpolynomial_evidence"
    a: int | None = None
    c: float | None = None
    witnesses: tuple[int, ...] = ()
    slopes: tuple[float, ...] = ()  # log2(m_j)/j, j >= 1
    note: str = ""

    @property
    def poly_bounded(self) -> bool:
        return self.kind == "poly_bounded"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "c": self.c, "a": self.a, "witnesses": list(self.witnesses), "note": self.note}


def _log2m(m: float) -> float:
    return math.log2(m) if m > 0 else -math.inf


def growth_witnesses(masses: Sequence[float]) -> tuple[int, ...]:
    """Greedy k_1 < k_2 < ... with log2 m_{k_l} > l * k_l."""
    out = []
    level = 1
    for k in range(1, len(masses)):
        if _log2m(masses[k]) > level * k:
            out.append(k)
            level += 1
    return tuple(out)


MIN_WITNESSES = 3


def growth_test(profile: DyadicProfile, a_max: int = 16, tol: float = 1e-12, min_witnesses: int = MIN_WITNESSES) -> GrowthVerdict:
    """Smallest a <= a_max with m_j / 2^(aj) non-increasing over the top half of the profile.

    A profile with at least ``min_witnesses`` greedy witnesses
    log2 m_{k_l} > l k_l is reported as superpolynomial evidence first: any
    finite profile admits some a, so the fit alone cannot see the trend.
    """
    m = list(profile.masses)
    slopes = tuple(_log2m(m[j]) / j for j in range(1, len(m)))
    if all(v == 0 for v in m):
        return GrowthVerdict("poly_bounded", 0, 0.0, (), slopes, "zero profile")
    wit = growth_witnesses(m)
    if len(wit) >= min_witnesses:
        return GrowthVerdict("superpolynomial_evidence", witnesses=wit, slopes=slopes,
                             note=f"evidence at truncation J={len(m) - 1}, not a proof")
    J = len(m) - 1
    top = range(J // 2, J + 1)
    logs = [_log2m(v) for v in m]
    for a in range(a_max + 1):
        r = [logs[j] - a * j for j in range(J + 1)]
        ok = all(r[j + 1] <= r[j] + tol * max(1.0, abs(r[j])) or r[j + 1] == -math.inf for j in top if j + 1 <= J)
        if ok:
            c = max(2.0 ** v for v in r if v > -math.inf)
            return GrowthVerdict("poly_bounded", a, c, (), slopes, f"checked j >= {J // 2}")
    return GrowthVerdict(
        "superpolynomial_evidence",
        witnesses=growth_witnesses(m),
        slopes=slopes,
        note=f"evidence at truncation J={J}, not a proof",
    )


@dataclass(frozen=True)
class SlowIncrease:
    p: int
    partials: tuple[float, ...]
    bound_chain: tuple[float, ...]
    lower_partials: tuple[float, ...]


def slow_increase_partial(profile: DyadicProfile, p: int) -> SlowIncrease:
    """Annulus-wise upper bounds of int d|mu| / (1 + |x|^p) and per-annulus lower bounds."""
    if p < 1:
        raise ValueError("p must be >= 1")
    m = profile.masses
    upper_terms, lower_terms = [], []
    for j, mj in enumerate(m):
        if j == 0:
            upper_terms.append(mj)
            lower_terms.append(mj / 2.0)
        else:
            upper_terms.append(mj / (1.0 + 2.0 ** ((j - 1) * p)))
            lower_terms.append(mj / (1.0 + 2.0 ** (j * p)))
    partials = tuple(math.fsum(upper_terms[: j + 1]) for j in range(len(m)))
    lower_partials = tuple(math.fsum(lower_terms[: j + 1]) for j in range(len(m)))
    return SlowIncrease(p, partials, tuple(lower_terms), lower_partials)


def poly_bound_value(verdict: GrowthVerdict, profile: DyadicProfile) -> float:
    """I_0 + c 2^(a+1), the bound for the partials at p = a + 1."""
    return profile.masses[0] + verdict.c * 2.0 ** (verdict.a + 1)


def block_divergence_terms(log2_tvs: Sequence[float], radii: Sequence[float], p: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Terms TV_m / (1 + r_m^p) and their partial sums (log-space TVs)."""
    terms = []
    for lt, r in zip(log2_tvs, radii):
        terms.append(2.0 ** (lt - math.log2(1.0 + r**p)))
    partials = tuple(math.fsum(terms[: i + 1]) for i in range(len(terms)))
    return tuple(terms), partials


@dataclass(frozen=True)
class PairingResult:
    partials: tuple[float, ...]  # S_N over the full shell supports
    shell_sums: tuple[float, ...]
    annulus_partials: tuple[float, ...]  # contributions from A_{k_n} only
    converging: bool | None = None
    tail_estimate: float | None = None


def _atoms_of(mu, J: int | None, budget: int) -> AtomicMeasure:
    if isinstance(mu, AtomicMeasure):
        return mu
    if isinstance(mu, BlockMeasure):
        R = math.ldexp(1.0, J) if J is not None else math.inf
        return restrict(mu, Window.cube(np.zeros(mu.dim), R), budget)
    if isinstance(mu, ProductMeasure):
        return mu.enumerate(budget)
    raise TypeError(f"cannot pair {type(mu).__name__}")


def pairing_partial_sums(mu, psi, J: int | None = None, budget: int = DEFAULT_ATOM_BUDGET) -> PairingResult:
    """S_N = sum over atoms in the first N shells of |w| psi(x), against |mu|."""
    atoms = variation(_atoms_of(mu, J, budget))
    x = atoms.positions
    w = atoms.weights.real
    if J is not None:
        keep = annulus_index(np.linalg.norm(x, axis=1)) <= J
        x, w = x[keep], w[keep]
    vals = np.asarray(psi(x if atoms.dim > 1 else x[:, 0])).reshape(-1)
    if isinstance(psi, PlateauSchwartz):
        shell = np.asarray(psi.shell_index(x if atoms.dim > 1 else x[:, 0])).reshape(-1)
        ann = annulus_index(np.linalg.norm(x, axis=1))
        sums, ann_sums = [], []
        for n, k in enumerate(psi.k):
            sel = shell == n
            sums.append(math.fsum(w[sel] * vals[sel]))
            sel_a = sel & (ann == k)
            ann_sums.append(math.fsum(w[sel_a] * vals[sel_a]))
        partials = tuple(math.fsum(sums[: i + 1]) for i in range(len(sums)))
        ann_partials = tuple(math.fsum(ann_sums[: i + 1]) for i in range(len(ann_sums)))
        tail = sums[-1] if sums else 0.0
        converging = len(sums) >= 2 and sums[-1] < 0.5 * max(sums[-2], 1e-300)
        return PairingResult(partials, tuple(sums), ann_partials, converging, tail)
    total = math.fsum(w * vals)
    return PairingResult((total,), (total,), (), None, None)


def pairing_bound_check(mu, psi, p: int, grid=None, J: int | None = None, budget: int = DEFAULT_ATOM_BUDGET) -> tuple[float, float]:
    """|mu(psi)| against sup (1 + |x|^p)|psi| * int d|mu| / (1 + |x|^p).

    The sup is taken over ``grid`` together with the atom positions themselves,
    so the comparison is between quantities computed on the same points.
    """
    atoms = _atoms_of(mu, J, budget)
    x = atoms.positions
    d = atoms.dim
    r = np.linalg.norm(x, axis=1)
    pv = np.asarray(psi(x if d > 1 else x[:, 0])).reshape(-1)
    lhs = abs(complex(math.fsum((atoms.weights * pv).real), math.fsum((atoms.weights * pv).imag)))
    integral = math.fsum(np.abs(atoms.weights) / (1.0 + r**p))
    sup = float(np.max((1.0 + r**p) * np.abs(pv))) if len(atoms) else 0.0
    if grid is not None:
        g = np.asarray(grid, dtype=float).reshape(-1, d)
        gv = np.asarray(psi(g if d > 1 else g[:, 0])).reshape(-1)
        sup = max(sup, float(np.max((1.0 + np.linalg.norm(g, axis=1) ** p) * np.abs(gv))))
    return lhs, sup * integral
