"""Index-set composition laws for operators in the 0- and b-scattering calculi.

Only the index-set shadows of kernels are tracked.  A triple carries one set
per boundary face of the double space: left boundary ``lb``, front face
``ff`` and right boundary ``rb``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AmbiguousTolerance, IntegrabilityViolation, ValidationError
from .indexset import (
    AMBIGUITY_FACTOR,
    DEFAULT_TOL,
    TruncatedIndexSet,
    extended_union,
    min_re,
    sum_,
)

DEFAULT_DELTA = 0.01


@dataclass(frozen=True)
class IndexTriple:
    lb: TruncatedIndexSet
    ff: TruncatedIndexSet
    rb: TruncatedIndexSet

    @property
    def tol(self) -> float:
        return max(self.lb.tol, self.ff.tol, self.rb.tol)

    def faces(self) -> dict[str, TruncatedIndexSet]:
        return {"lb": self.lb, "ff": self.ff, "rb": self.rb}

    def truncate(self, C) -> "IndexTriple":
        return IndexTriple(self.lb.truncate(C), self.ff.truncate(C), self.rb.truncate(C))

    def to_dict(self) -> dict:
        return {k: v.to_dict() for k, v in self.faces().items()}

    @classmethod
    def from_dict(cls, data: dict) -> "IndexTriple":
        try:
            return cls(*(TruncatedIndexSet.from_dict(data[k]) for k in ("lb", "ff", "rb")))
        except KeyError as exc:
            raise ValidationError(f"index triple record is missing face {exc}") from exc


@dataclass(frozen=True)
class ExtendedIndexQuad:
    lb: TruncatedIndexSet
    ff: TruncatedIndexSet
    ff_b: TruncatedIndexSet
    rb: TruncatedIndexSet

    def forget(self) -> IndexTriple:
        return IndexTriple(self.lb, self.ff, self.rb)

    def to_dict(self) -> dict:
        return {"lb": self.lb.to_dict(), "ff": self.ff.to_dict(), "ff_b": self.ff_b.to_dict(), "rb": self.rb.to_dict()}


@dataclass(frozen=True)
class WeightTriple:
    lb: float
    ff: float
    rb: float

    def __post_init__(self):
        for name in ("lb", "ff", "rb"):
            v = getattr(self, name)
            if isinstance(v, float) and math.isnan(v):
                raise ValidationError(f"weight {name} is NaN")


def check_integrability(rb_min, lb_min, n: int, tol: float) -> None:
    """Require rb_min + lb_min > n - 1, with an ambiguity band just above it."""
    v = rb_min + lb_min
    threshold = n - 1
    if v <= threshold:
        raise IntegrabilityViolation(
            f"Re(E_rb) + Re(F_lb) = {float(v):.12g} is not greater than n - 1 = {threshold}"
        )
    if v - threshold <= AMBIGUITY_FACTOR * tol:
        raise AmbiguousTolerance(
            f"Re(E_rb) + Re(F_lb) = {float(v):.12g} exceeds n - 1 = {threshold} only by "
            f"{float(v - threshold):.3g}, inside the margin {AMBIGUITY_FACTOR * tol:g}"
        )


def _compose(E: IndexTriple, F: IndexTriple) -> IndexTriple:
    lb = extended_union(E.lb, sum_(E.ff, F.lb))
    rb = extended_union(sum_(E.rb, F.ff), F.rb)
    ff = extended_union(sum_(E.ff, F.ff), sum_(E.lb, F.rb))
    return IndexTriple(lb, ff, rb)


def compose_0(E: IndexTriple, F: IndexTriple, n: int) -> IndexTriple:
    """Index sets of the composition of two residual 0-operators."""
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    check_integrability(min_re(E.rb), min_re(F.lb), n, max(E.tol, F.tol))
    return _compose(E, F)


def compose_bsc(E: IndexTriple, F: IndexTriple) -> IndexTriple:
    """Same combinatorics for b-scattering operators on the half-line.

    No integrability condition is imposed; in every composition this package
    performs, one of the two corner sets is trivial.
    """
    return _compose(E, F)


def act_phg(E: IndexTriple, F: TruncatedIndexSet, n: int) -> TruncatedIndexSet:
    """Index set of P u for P with index triple E acting on u with index set F."""
    check_integrability(min_re(E.rb), min_re(F), n, max(E.tol, F.tol))
    return extended_union(sum_(F, E.ff), E.lb)


def lift_to_extended(E: IndexTriple) -> ExtendedIndexQuad:
    return ExtendedIndexQuad(E.lb, E.ff, sum_(E.lb, E.rb), E.rb)


def _is_natural(x, tol: float) -> bool:
    if x == math.inf:
        return False
    r = round(x)
    return r >= 0 and abs(x - r) <= tol


def _strict_min(a, b, delta):
    """min(a, b), pushed down by delta when the two arguments tie."""
    m = min(a, b)
    return m - delta if a == b and m != math.inf else m


def compose_bounds(
    a: WeightTriple, b: WeightTriple, n: int, delta: float = DEFAULT_DELTA, tol: float = DEFAULT_TOL
) -> WeightTriple:
    """Weights of the composition in the calculus with bounds.

    When both front-face weights vanish the front-face weight is
    ``a.lb + b.rb`` unless that lands on a nonnegative integer, in which case
    it is lowered by ``delta``.
    """
    if delta <= 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    v = a.rb + b.lb
    if v <= n - 1:
        raise IntegrabilityViolation(f"a.rb + b.lb = {v:.12g} is not greater than n - 1 = {n - 1}")
    g_lb = _strict_min(a.lb, a.ff + b.lb, delta)
    g_rb = _strict_min(a.rb + b.ff, b.rb, delta)
    if a.ff == 0 and b.ff == 0:
        g_ff = a.lb + b.rb
        if _is_natural(g_ff, tol):
            g_ff -= delta
    else:
        g_ff = _strict_min(a.ff + b.ff, a.lb + b.rb, delta)
    return WeightTriple(g_lb, g_ff, g_rb)

