"""Recorded inequality checks: {claim, lhs, rhs, tolerance, status}."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Claim:
    claim: str
    lhs: float
    rhs: float
    relation: str  # "<=", ">=", "==", ">"
    tolerance: float = 0.0
    anchor: str = ""

    @property
    def ok(self) -> bool:
        lhs, rhs, tol = self.lhs, self.rhs, self.tolerance
        if any(isinstance(v, float) and math.isnan(v) for v in (lhs, rhs)):
            return False
        if self.relation == "<=":
            return lhs <= rhs + tol * max(1.0, abs(rhs)) if tol else lhs <= rhs
        if self.relation == ">=":
            return lhs >= rhs - tol * max(1.0, abs(rhs)) if tol else lhs >= rhs
        if self.relation == ">":
            return lhs > rhs
        if self.relation == "==":
            return abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs)) if tol else lhs == rhs
        raise ValueError(f"unknown relation {self.relation}")

    @property
    def status(self) -> str:
        return "pass" if self.ok else "fail"

    def to_dict(self) -> dict:
        out = {
            "claim": self.claim,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "relation": self.relation,
            "tolerance": self.tolerance,
            "status": self.status,
        }
        if self.anchor:
            out["anchor"] = self.anchor
        return out


def _num(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    v = float(v)
    if math.isfinite(v):
        return v
    return str(v)


class ConstructionError(RuntimeError):
    """A factory produced an object violating one of its certified bounds."""

    def __init__(self, claims):
        bad = [c for c in claims if not c.ok]
        super().__init__("; ".join(f"{c.claim}: {c.lhs!r} {c.relation} {c.rhs!r} failed" for c in bad))
        self.claims = claims


def require(claims, strict: bool = True):
    if strict and any(not c.ok for c in claims):
        raise ConstructionError(claims)
    return claims
