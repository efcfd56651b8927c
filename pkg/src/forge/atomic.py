"""Finite signed/complex atomic measures on R^d and their lazy relatives.

Three containers live here:

* :class:`AtomicMeasure` -- an explicit, merged list of atoms.
* :class:`ProductMeasure` -- an n-fold convolution kept in factored form,
  so that total variation and Fourier values never require the
  ``prod(len(factor))`` enumeration.
* :class:`BlockMeasure` -- a finite sequence of shifted payloads with
  pairwise disjoint supports.

Positions closer than :data:`MERGE_TOL` (Euclidean) are treated as the same
point and their weights are added; atoms whose weight is exactly zero are
dropped.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

MERGE_TOL = 1e-12
DEFAULT_ATOM_BUDGET = 2**20


class BudgetExceeded(RuntimeError):
    """An operation would need more work than its configured budget."""


class DimensionMismatch(ValueError):
    pass


def _as_vector(v, dim: int | None = None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim != 1:
        raise ValueError("expected a vector")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True)
class Window:
    """Closed axis-aligned box ``[lower_i, upper_i]`` in R^d."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lower))
        hi = tuple(float(x) for x in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise DimensionMismatch("lower/upper length differ")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("window needs lower <= upper per coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Window":
        return cls((lo,), (hi,))

    @classmethod
    def everything(cls, dim: int = 1) -> "Window":
        return cls((-math.inf,) * dim, (math.inf,) * dim)

    @classmethod
    def cube(cls, center, radius: float) -> "Window":
        c = _as_vector(center)
        return cls(tuple(c - radius), tuple(c + radius))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def shifted(self, v) -> "Window":
        v = _as_vector(v, self.dim)
        return Window(tuple(np.asarray(self.lower) + v), tuple(np.asarray(self.upper) + v))

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def intersects(self, lo, hi) -> bool:
        return bool(np.all(np.asarray(lo) <= self.upper) and np.all(np.asarray(hi) >= self.lower))

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


class Atom(NamedTuple):
    position: np.ndarray
    weight: complex


def _merge(positions: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Merge coincident positions (distance <= tol), sum weights, drop exact zeros."""
    n, d = positions.shape
    if n == 0:
        return positions, weights
    if d == 1:
        order = np.argsort(positions[:, 0], kind="stable")
        p, w = positions[order], weights[order]
        new_group = np.empty(n, dtype=bool)
        new_group[0] = True
        new_group[1:] = np.diff(p[:, 0]) > tol
    else:
        order = np.lexsort(positions.T[::-1])
        p, w = positions[order], weights[order]
        pairs = cKDTree(p).query_pairs(tol, output_type="ndarray")
        if len(pairs) == 0:
            new_group = np.ones(n, dtype=bool)
        else:
            parent = np.arange(n)

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for i, j in pairs:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
            roots = np.array([find(i) for i in range(n)])
            # regroup so members of one cluster are contiguous
            reorder = np.argsort(roots, kind="stable")
            p, w, roots = p[reorder], w[reorder], roots[reorder]
            new_group = np.empty(n, dtype=bool)
            new_group[0] = True
            new_group[1:] = roots[1:] != roots[:-1]
    if new_group.all():
        keep = w != 0
        return p[keep], w[keep]
    starts = np.flatnonzero(new_group)
    merged_w = np.add.reduceat(w, starts)
    merged_p = p[starts]
    keep = merged_w != 0
    return merged_p[keep], merged_w[keep]


class AtomicMeasure:
    """Finite complex atomic measure ``sum_j w_j delta_{x_j}`` on R^d.

    Positions are stored relative to an ``offset`` vector so that translating
    back and forth is exact.
    """

    __slots__ = ("_base", "_weights", "_offset", "_min_gap")

    def __init__(self, positions, weights, dim: int | None = None, *, offset=None, merged: bool = False):
        w = np.asarray(weights, dtype=complex).ravel()
        p = np.asarray(positions, dtype=float)
        if dim is None:
            if p.ndim == 2:
                dim = p.shape[1]
            elif offset is not None:
                dim = len(np.atleast_1d(offset))
            else:
                dim = 1
        p = p.reshape(-1, dim) if p.size else np.zeros((0, dim))
        if p.shape[0] != w.shape[0]:
            raise ValueError("positions and weights disagree in length")
        if not np.all(np.isfinite(p)):
            raise ValueError("atom positions must be finite")
        if not merged:
            p, w = _merge(p, w)
        p = np.ascontiguousarray(p)
        p.setflags(write=False)
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        off = np.zeros(dim) if offset is None else _as_vector(offset, dim).copy()
        off.setflags(write=False)
        self._base = p
        self._weights = w
        self._offset = off
        self._min_gap = None

    # construction helpers -------------------------------------------------
    @classmethod
    def dirac(cls, x, weight: complex = 1.0) -> "AtomicMeasure":
        x = _as_vector(x)
        return cls(x[None, :], [weight], x.shape[0])

    @classmethod
    def zero(cls, dim: int = 1) -> "AtomicMeasure":
        return cls(np.zeros((0, dim)), [], dim)

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple], dim: int | None = None) -> "AtomicMeasure":
        if not atoms:
            return cls.zero(dim or 1)
        pos = np.array([np.atleast_1d(np.asarray(a[0], dtype=float)) for a in atoms])
        return cls(pos, [a[1] for a in atoms], pos.shape[1])

    # accessors ----------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self._base.shape[1]

    @property
    def positions(self) -> np.ndarray:
        if not self._offset.any():
            return self._base
        return self._base + self._offset

    @property
    def base_positions(self) -> np.ndarray:
        return self._base

    @property
    def offset(self) -> np.ndarray:
        return self._offset

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(p, complex(w)) for p, w in zip(self.positions, self._weights)]

    def __len__(self) -> int:
        return self._weights.shape[0]

    def __repr__(self) -> str:
        return f"AtomicMeasure(dim={self.dim}, atoms={len(self)})"

    @property
    def min_gap(self) -> float:
        """Minimal pairwise distance between atoms (inf for fewer than two)."""
        if self._min_gap is None:
            self._min_gap = _min_gap(self._base)
        return self._min_gap

    def total_mass(self) -> complex:
        return complex(math.fsum(self._weights.real), math.fsum(self._weights.imag))

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        if len(self) == 0:
            z = np.zeros(self.dim) + self._offset
            return z, z
        return self._base.min(axis=0) + self._offset, self._base.max(axis=0) + self._offset

    # algebra ----------------------------------------------------------------------
    def __neg__(self) -> "AtomicMeasure":
        return AtomicMeasure(self._base, -self._weights, self.dim, offset=self._offset, merged=True)

    def __mul__(self, c) -> "AtomicMeasure":
        c = complex(c)
        return AtomicMeasure(self._base, self._weights * c, self.dim, offset=self._offset, merged=c != 0)

    __rmul__ = __mul__

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch("cannot add measures of different dimension")
        return AtomicMeasure(
            np.vstack([self.positions, other.positions]),
            np.concatenate([self._weights, other._weights]),
            self.dim,
        )

    def __sub__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return self + (-other)

    def same_atoms(self, other: "AtomicMeasure") -> bool:
        """Exact, atom-for-atom equality of positions and weights."""
        if self.dim != other.dim or len(self) != len(other):
            return False
        return bool(np.array_equal(self.positions, other.positions) and np.array_equal(self._weights, other._weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return self.same_atoms(other)

    __hash__ = None

    # serialization ------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"x": [float(c) for c in p], "re": float(w.real), "im": float(w.imag)}
                for p, w in zip(self.positions, self._weights)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMeasure":
        dim = int(data["dim"])
        atoms = data["atoms"]
        pos = np.array([a["x"] for a in atoms], dtype=float).reshape(-1, dim)
        w = np.array([complex(a["re"], a.get("im", 0.0)) for a in atoms], dtype=complex)
        return cls(pos, w, dim, merged=True)


def _min_gap(points: np.ndarray) -> float:
    n, d = points.shape
    if n < 2:
        return math.inf
    if d == 1:
        return float(np.min(np.diff(np.sort(points[:, 0]))))
    dist, _ = cKDTree(points).query(points, k=2)
    return float(dist[:, 1].min())


# ---------------------------------------------------------------------------
# lazy product form


def _log2_abs(x: float) -> float:
    return math.log2(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class ProductMeasure:
    """``scale * 2**scale_exp * delta_shift * conv(factors)`` without enumeration.

    ``factor_bounds`` optionally carries certified bounds on ``sup |FT(factor)|``
    (tighter than the factor total variation); ``certificate`` records why the
    implicit sum positions are known to be pairwise distinct, if they are.
    """

    factors: tuple[AtomicMeasure, ...]
    shift: np.ndarray
    scale: float = 1.0
    scale_exp: int = 0
    factor_bounds: tuple[float, ...] | None = None
    certificate: str | None = None

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a product measure needs at least one factor")
        dim = factors[0].dim
        if any(f.dim != dim for f in factors):
            raise DimensionMismatch("all factors must share the dimension")
        shift = _as_vector(self.shift, dim).copy()
        shift.setflags(write=False)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be a positive finite real")
        if self.factor_bounds is not None and len(self.factor_bounds) != len(factors):
            raise ValueError("one bound per factor expected")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "scale_exp", int(self.scale_exp))

    @classmethod
    def of(cls, factors, shift=None, **kw) -> "ProductMeasure":
        factors = tuple(factors)
        if shift is None:
            shift = np.zeros(factors[0].dim)
        return cls(factors, shift, **kw)

    @property
    def dim(self) -> int:
        return self.factors[0].dim

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def atom_count(self) -> int:
        return math.prod(len(f) for f in self.factors)

    @property
    def global_scale(self) -> float:
        return math.ldexp(self.scale, self.scale_exp)

    @property
    def log2_scale(self) -> float:
        return math.log2(self.scale) + self.scale_exp

    def sup_bounds(self) -> tuple[float, ...]:
        if self.factor_bounds is not None:
            return self.factor_bounds
        return tuple(float(np.sum(np.abs(f.weights))) for f in self.factors)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        lo = self.shift.copy()
        hi = self.shift.copy()
        for f in self.factors:
            flo, fhi = f.bbox()
            lo = lo + flo
            hi = hi + fhi
        return lo, hi

    def log2_total_variation_bound(self) -> float:
        """log2 of ``scale * prod TV(factor)``; equals log2 TV once sums are distinct."""
        return self.log2_scale + math.fsum(_log2_abs(float(np.sum(np.abs(f.weights)))) for f in self.factors)

    def sum_positions(self, budget: int = DEFAULT_ATOM_BUDGET) -> tuple[np.ndarray, np.ndarray]:
        """All implicit (position, weight) pairs, unmerged, in lexicographic factor order."""
        if self.atom_count > budget:
            raise BudgetExceeded(f"{self.atom_count} implicit atoms exceed budget {budget}")
        pos = np.zeros((1, self.dim))
        w = np.ones(1, dtype=complex)
        for f in self.factors:
            pos = (pos[:, None, :] + f.positions[None, :, :]).reshape(-1, self.dim)
            w = (w[:, None] * f.weights[None, :]).ravel()
        return pos + self.shift, w * self.global_scale

    def enumerate(self, budget: int = DEFAULT_ATOM_BUDGET) -> AtomicMeasure:
        pos, w = self.sum_positions(budget)
        return AtomicMeasure(pos, w, self.dim)

    def to_dict(self) -> dict:
        out = {
            "factors": [f.to_dict() for f in self.factors],
            "shift": [float(s) for s in self.shift],
            "scale": float(self.scale),
            "scale_exp": self.scale_exp,
        }
        if self.factor_bounds is not None:
            out["factor_bounds"] = [float(b) for b in self.factor_bounds]
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ProductMeasure":
        bounds = data.get("factor_bounds")
        return cls(
            tuple(AtomicMeasure.from_dict(f) for f in data["factors"]),
            np.asarray(data["shift"], dtype=float),
            scale=float(data.get("scale", 1.0)),
            scale_exp=int(data.get("scale_exp", 0)),
            factor_bounds=None if bounds is None else tuple(float(b) for b in bounds),
            certificate=data.get("certificate"),
        )


@dataclass(frozen=True)
class DensityBlock:
    """An absolutely continuous block ``density(x) dx`` supported in ``[-radius, radius]``.

    ``l1`` is the variation mass ``||density||_1``; when ``l1_is_lower`` it is
    only a certified lower bound.  ``pair(test)`` returns ``(value, error)``
    for ``int test(x) density(x) dx``.
    """

    density: Callable
    radius: float
    l1: float
    l1_is_lower: bool = False
    symmetric: bool = True
    pair: Callable | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return 1

    def bbox(self):
        return np.array([-self.radius]), np.array([self.radius])


Payload = Union[AtomicMeasure, ProductMeasure, DensityBlock]


def payload_bbox(p: Payload):
    return p.bbox()


@dataclass(frozen=True)
class BlockMeasure:
    """Finite sum of shifted payloads ``sum_b delta_{shift_b} * payload_b``."""

    blocks: tuple[tuple[np.ndarray, Payload], ...]
    support_radius: float
    spacing: np.ndarray | None = None
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        blocks = tuple((_as_vector(s).copy(), p) for s, p in self.blocks)
        for s, _ in blocks:
            s.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        if self.spacing is not None:
            object.__setattr__(self, "spacing", _as_vector(self.spacing))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i + 1) for i in range(len(blocks))))
        A = self.support_radius
        for s, p in blocks:
            lo, hi = p.bbox()
            if np.any(lo < -A - MERGE_TOL) or np.any(hi > A + MERGE_TOL):
                raise ValueError("payload support exceeds the declared support radius")
        boxes = self.block_boxes()
        for (lo1, hi1), (lo2, hi2) in itertools.combinations(boxes, 2):
            if np.all(lo1 <= hi2) and np.all(lo2 <= hi1):
                raise ValueError("shifted block supports must be pairwise disjoint")

    @property
    def dim(self) -> int:
        return self.blocks[0][0].shape[0] if self.blocks else 1

    def __len__(self) -> int:
        return len(self.blocks)

    def block_boxes(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out = []
        for s, p in self.blocks:
            lo, hi = p.bbox()
            out.append((lo + s, hi + s))
        return out

    def truncate(self, M: int) -> "BlockMeasure":
        return BlockMeasure(self.blocks[:M], self.support_radius, self.spacing, self.labels[:M])

    def has_density(self) -> bool:
        return any(isinstance(p, DensityBlock) for _, p in self.blocks)


# ---------------------------------------------------------------------------
# operations


def _check_dim(a, b):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} vs {b.dim}")


def convolve(mu1: AtomicMeasure, mu2: AtomicMeasure) -> AtomicMeasure:
    """All pairwise position sums with product weights, merged."""
    _check_dim(mu1, mu2)
    d = mu1.dim
    pos = (mu1.base_positions[:, None, :] + mu2.base_positions[None, :, :]).reshape(-1, d)
    w = (mu1.weights[:, None] * mu2.weights[None, :]).ravel()
    return AtomicMeasure(pos, w, d, offset=mu1.offset + mu2.offset)


def translate(mu, v):
    """``delta_v * mu``; only the offset (or the global shift) moves."""
    if isinstance(mu, AtomicMeasure):
        v = _as_vector(v, mu.dim)
        return AtomicMeasure(mu.base_positions, mu.weights, mu.dim, offset=mu.offset + v, merged=True)
    if isinstance(mu, ProductMeasure):
        v = _as_vector(v, mu.dim)
        return ProductMeasure(mu.factors, mu.shift + v, mu.scale, mu.scale_exp, mu.factor_bounds, mu.certificate)
    if isinstance(mu, BlockMeasure):
        v = _as_vector(v, mu.dim)
        return BlockMeasure(tuple((s + v, p) for s, p in mu.blocks), mu.support_radius, mu.spacing, mu.labels)
    raise TypeError(f"cannot translate {type(mu).__name__}")


def total_variation(mu, budget: int = DEFAULT_ATOM_BUDGET) -> float:
    if isinstance(mu, AtomicMeasure):
        return math.fsum(np.abs(mu.weights))
    if isinstance(mu, ProductMeasure):
        if mu.certificate is None:
            if mu.atom_count > budget:
                raise BudgetExceeded("sum-position distinctness not certified and enumeration over budget")
            check = distinctness_check(mu, budget)
            if not check.distinct:
                return total_variation(mu.enumerate(budget))
        return 2.0 ** mu.log2_total_variation_bound()
    if isinstance(mu, BlockMeasure):
        return math.fsum(block_total_variation(p, budget) for _, p in mu.blocks)
    if isinstance(mu, DensityBlock):
        return mu.l1
    raise TypeError(f"no total variation for {type(mu).__name__}")


def block_total_variation(p: Payload, budget: int = DEFAULT_ATOM_BUDGET) -> float:
    return total_variation(p, budget)


@dataclass(frozen=True)
class HahnJordan:
    nu_plus: AtomicMeasure
    nu_minus: AtomicMeasure
    sigma_plus: AtomicMeasure
    sigma_minus: AtomicMeasure

    def __iter__(self):
        return iter((self.nu_plus, self.nu_minus, self.sigma_plus, self.sigma_minus))

    def recombine(self) -> AtomicMeasure:
        return (self.nu_plus - self.nu_minus) + 1j * (self.sigma_plus - self.sigma_minus)


def hahn_jordan(mu: AtomicMeasure) -> HahnJordan:
    """Split ``mu = (nu+ - nu-) + i (sigma+ - sigma-)`` into four positive parts."""
    re, im = mu.weights.real, mu.weights.imag
    parts = [np.maximum(re, 0.0), np.maximum(-re, 0.0), np.maximum(im, 0.0), np.maximum(-im, 0.0)]
    return HahnJordan(*(
        AtomicMeasure(mu.base_positions[w != 0], w[w != 0], mu.dim, offset=mu.offset, merged=True)
        for w in parts
    ))


def variation(mu: AtomicMeasure) -> AtomicMeasure:
    """The variation measure ``|mu|``: same atoms, weights replaced by their moduli."""
    return AtomicMeasure(mu.base_positions, np.abs(mu.weights), mu.dim, offset=mu.offset, merged=True)


def restrict(mu, window: Window, budget: int = DEFAULT_ATOM_BUDGET) -> AtomicMeasure:
    if isinstance(mu, AtomicMeasure):
        if window.dim != mu.dim:
            raise DimensionMismatch("window dimension differs")
        keep = window.shifted(-mu.offset).contains(mu.base_positions) if mu.offset.any() else window.contains(mu.base_positions)
        return AtomicMeasure(mu.base_positions[keep], mu.weights[keep], mu.dim, offset=mu.offset, merged=True)
    if isinstance(mu, ProductMeasure):
        lo, hi = mu.bbox()
        if not window.intersects(lo, hi):
            return AtomicMeasure.zero(mu.dim)
        return restrict(mu.enumerate(budget), window, budget)
    if isinstance(mu, BlockMeasure):
        pieces = []
        for (lo, hi), (s, p) in zip(mu.block_boxes(), mu.blocks):
            if not window.intersects(lo, hi):
                continue
            if isinstance(p, DensityBlock):
                raise TypeError("window touches a density block; restriction is not atomic")
            atomic = p if isinstance(p, AtomicMeasure) else p.enumerate(budget)
            pieces.append(restrict(translate(atomic, s), window, budget))
        if not pieces:
            return AtomicMeasure.zero(mu.dim)
        pos = np.vstack([q.positions for q in pieces])
        w = np.concatenate([q.weights for q in pieces])
        return AtomicMeasure(pos, w, mu.dim, merged=True)
    raise TypeError(f"cannot restrict {type(mu).__name__}")


@dataclass(frozen=True)
class DistinctnessResult:
    distinct: bool | None
    min_gap: float
    verdict: str  # "distinct", "collision" or "uncertified"


def distinctness_check(p: ProductMeasure, budget: int = DEFAULT_ATOM_BUDGET) -> DistinctnessResult:
    """Are all implicit sum positions pairwise more than MERGE_TOL apart?"""
    if p.n_factors == 1:
        g = p.factors[0].min_gap
        return DistinctnessResult(g > MERGE_TOL, g, "distinct" if g > MERGE_TOL else "collision")
    if p.atom_count > budget:
        return DistinctnessResult(None, math.nan, "uncertified")
    pos, _ = p.sum_positions(budget)
    g = _min_gap(pos)
    ok = g > MERGE_TOL
    return DistinctnessResult(ok, g, "distinct" if ok else "collision")


def certify(p: ProductMeasure, budget: int = DEFAULT_ATOM_BUDGET) -> ProductMeasure:
    """Return ``p`` carrying an enumeration certificate, or raise if sums collide."""
    res = distinctness_check(p, budget)
    if res.verdict == "uncertified":
        raise BudgetExceeded("cannot certify distinctness within budget")
    if not res.distinct:
        raise ValueError(f"sum positions collide (min gap {res.min_gap:g})")
    return ProductMeasure(p.factors, p.shift, p.scale, p.scale_exp, p.factor_bounds, "enumerated")


def _payload_to_dict(p) -> dict:
    if isinstance(p, DensityBlock):
        # densities are code, not data: record the summary only
        return {"density": p.label, "radius": p.radius, "l1": p.l1, "l1_is_lower": p.l1_is_lower}
    return p.to_dict()


def measure_to_dict(mu) -> dict:
    if isinstance(mu, (AtomicMeasure, ProductMeasure)):
        return mu.to_dict()
    if isinstance(mu, BlockMeasure):
        return {
            "dim": mu.dim,
            "support_radius": mu.support_radius,
            "spacing": None if mu.spacing is None else mu.spacing.tolist(),
            "blocks": [
                {"shift": s.tolist(), "label": lab, "payload": _payload_to_dict(p)}
                for (s, p), lab in zip(mu.blocks, mu.labels)
            ],
        }
    raise TypeError(f"cannot serialize {type(mu).__name__}")


def measure_from_dict(data: dict):
    if "blocks" in data:
        blocks = []
        for b in data["blocks"]:
            if "density" in b["payload"]:
                raise ValueError("density blocks cannot be rebuilt from a summary")
            blocks.append((np.asarray(b["shift"], dtype=float), measure_from_dict(b["payload"])))
        return BlockMeasure(tuple(blocks), data["support_radius"], data.get("spacing"), tuple(b.get("label", "") for b in data["blocks"]))
    if "factors" in data:
        return ProductMeasure.from_dict(data)
    return AtomicMeasure.from_dict(data)
