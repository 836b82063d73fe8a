"""Cutoff-aware algebra of index sets.

An index set E is a subset of C x N0 closed under (z, k) -> (z + 1, k) and
(z, k) -> (z, k - 1).  It is stored through a finite list of generators
whose closure is the set; a validity bound ``cutoff`` records that the
stored set is only claimed to be exact for Re z < cutoff.  Sets such as
the iterated families ``hat``/``flat``/``sharp`` are not finitely generated,
so they are always produced below a user-chosen bound.

Internally a set is described class by class: exponents that differ by an
integer share a representative ``rep`` and the set is the step function
``offset -> maximal log power``.  In that description the extended union
adds the shifted profiles ``k + 1`` pointwise, which makes it commutative
and associative, and the sum of two sets is generated by pairwise sums of
generators.

Exponents may be floats (coincidence up to ``tol``) or Gaussian rationals
built from :class:`fractions.Fraction` (exact mode, ``tol == 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .errors import AmbiguousCoincidence, CutoffExceeded, ValidationError

Real = Union[float, Fraction]

DEFAULT_TOL = 1e-9
INF = math.inf
AMBIGUITY_FACTOR = 10


def _coerce_real(x) -> Real:
    if isinstance(x, bool):
        raise TypeError("bool is not a valid exponent component")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class ComplexExponent:
    """Exponent z of a term t^z (log t)^k."""

    re: Real
    im: Real = Fraction(0)

    def __post_init__(self):
        re, im = _coerce_real(self.re), _coerce_real(self.im)
        if isinstance(re, float) or isinstance(im, float):
            re, im = float(re), float(im)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValidationError(f"non-finite exponent ({self.re}, {self.im})")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def of(cls, value) -> "ComplexExponent":
        if isinstance(value, ComplexExponent):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, tuple):
            return cls(*value)
        return cls(value)

    @property
    def exact(self) -> bool:
        return isinstance(self.re, Fraction)

    def __add__(self, other) -> "ComplexExponent":
        o = ComplexExponent.of(other)
        return ComplexExponent(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "ComplexExponent":
        o = ComplexExponent.of(other)
        return ComplexExponent(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "ComplexExponent":
        return ComplexExponent.of(other) - self

    def __neg__(self) -> "ComplexExponent":
        return ComplexExponent(-self.re, -self.im)

    def conjugate(self) -> "ComplexExponent":
        return ComplexExponent(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def distance(self, other) -> Real:
        d = self - other
        if d.exact:
            # exact mode only ever compares against zero
            return Fraction(0) if (d.re == 0 and d.im == 0) else abs(d.re) + abs(d.im)
        return math.hypot(d.re, d.im)

    def sort_key(self):
        return (self.re, self.im)

    def __str__(self) -> str:
        re = _fmt(self.re)
        if self.im == 0:
            return re
        return f"{re}{'+' if self.im > 0 else '-'}{_fmt(abs(self.im))}i"


def _fmt(x: Real) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return f"{x:.10g}"


@dataclass(frozen=True)
class IndexPoint:
    z: ComplexExponent
    k: int

    def __post_init__(self):
        object.__setattr__(self, "z", ComplexExponent.of(self.z))
        if int(self.k) != self.k or self.k < 0:
            raise ValidationError(f"log power must be a nonnegative integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    def sort_key(self):
        return (self.z.re, self.z.im, self.k)

    def __str__(self) -> str:
        return f"({self.z},{self.k})"


def as_point(p) -> IndexPoint:
    if isinstance(p, IndexPoint):
        return p
    if len(p) == 2:
        return IndexPoint(ComplexExponent.of(p[0]), p[1])
    if len(p) == 3:
        return IndexPoint(ComplexExponent(p[0], p[1]), p[2])
    raise ValidationError(f"cannot interpret {p!r} as an index point")


def _integer_offset(d: ComplexExponent, tol: float) -> int | None:
    """Integer n with |d - n| <= tol, None if d is clearly off the lattice."""
    n = round(d.re)
    dist = d.distance(n)
    if dist <= tol:
        return int(n)
    if dist <= AMBIGUITY_FACTOR * tol:
        raise AmbiguousCoincidence(
            f"exponent difference {d} is {float(dist):.3g} from the integer {n}; "
            f"ambiguous within tolerance band ({tol:g}, {AMBIGUITY_FACTOR * tol:g}]"
        )
    return None


class _Classes:
    """Exponent classes modulo integers, with one representative each."""

    def __init__(self, tol: float):
        self.tol = tol
        self.reps: list[ComplexExponent] = []

    def locate(self, z: ComplexExponent) -> tuple[int, int]:
        for i, rep in enumerate(self.reps):
            n = _integer_offset(z - rep, self.tol)
            if n is not None:
                return i, n
        self.reps.append(z)
        return len(self.reps) - 1, 0


def _profiles(classes: _Classes, points: Iterable[IndexPoint]) -> dict[int, dict[int, int]]:
    prof: dict[int, dict[int, int]] = {}
    for p in sorted(points, key=IndexPoint.sort_key):
        c, off = classes.locate(p.z)
        slot = prof.setdefault(c, {})
        slot[off] = max(slot.get(off, -1), p.k)
    return prof


def _generators_from_profiles(classes: _Classes, prof: dict[int, dict[int, int]], cutoff: Real):
    gens = []
    for c, steps in prof.items():
        running = -1
        for off in sorted(steps):
            k = steps[off]
            if k <= running:
                continue
            z = classes.reps[c] + off
            if z.re >= cutoff:
                break
            gens.append(IndexPoint(z, k))
            running = k
    gens.sort(key=IndexPoint.sort_key)
    return tuple(gens)


def _running_max(steps: dict[int, int], offsets: list[int]) -> list[int]:
    out, run = [], -1
    for o in offsets:
        run = max(run, steps.get(o, -1))
        out.append(run)
    return out


@dataclass(frozen=True)
class TruncatedIndexSet:
    """Index set given by generators, exact for Re z < cutoff.

    Generators are canonicalized on construction: dominated generators
    (another generator lies an integer step below with at least the same
    log power) and generators at or above the cutoff are dropped.
    """

    generators: tuple[IndexPoint, ...] = ()
    cutoff: Real = INF
    tol: float = DEFAULT_TOL
    _canonical: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tol < 0 or not math.isfinite(self.tol):
            raise ValidationError(f"tolerance must be finite and nonnegative, got {self.tol}")
        cutoff = self.cutoff
        if isinstance(cutoff, (int, Fraction)) and not isinstance(cutoff, bool):
            cutoff = Fraction(cutoff)
        else:
            cutoff = float(cutoff)
            if math.isnan(cutoff):
                raise ValidationError("cutoff is NaN")
        object.__setattr__(self, "cutoff", cutoff)
        pts = tuple(as_point(p) for p in self.generators)
        if not self._canonical:
            classes = _Classes(self.tol)
            pts = _generators_from_profiles(classes, _profiles(classes, pts), cutoff)
        object.__setattr__(self, "generators", pts)
        object.__setattr__(self, "_canonical", True)

    @classmethod
    def from_points(cls, points, cutoff: Real = INF, tol: float = DEFAULT_TOL) -> "TruncatedIndexSet":
        return cls(tuple(as_point(p) for p in points), cutoff, tol)

    def __bool__(self) -> bool:
        return bool(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def exact(self) -> bool:
        return self.tol == 0 and all(g.z.exact for g in self.generators)

    def with_cutoff(self, cutoff: Real) -> "TruncatedIndexSet":
        return TruncatedIndexSet(self.generators, cutoff, self.tol)

    def truncate(self, cutoff: Real) -> "TruncatedIndexSet":
        return TruncatedIndexSet(self.generators, min(self.cutoff, cutoff), self.tol)

    def same_generators(self, other: "TruncatedIndexSet") -> bool:
        if len(self.generators) != len(other.generators):
            return False
        tol = max(self.tol, other.tol)
        return all(
            a.k == b.k and a.z.distance(b.z) <= tol
            for a, b in zip(self.generators, other.generators)
        )

    def __str__(self) -> str:
        body = ",".join(str(g) for g in self.generators) if self.generators else ""
        tail = "" if self.cutoff == INF else f" [Re z < {_fmt(self.cutoff)}]"
        return "{" + body + "}" + tail

    # serialization
    def to_dict(self) -> dict:
        return {
            "generators": [
                {"re": encode_real(g.z.re), "im": encode_real(g.z.im), "k": g.k} for g in self.generators
            ],
            "cutoff": encode_real(self.cutoff),
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedIndexSet":
        try:
            gens = [
                IndexPoint(ComplexExponent(decode_real(g["re"]), decode_real(g.get("im", 0))), g["k"])
                for g in data["generators"]
            ]
            return cls(tuple(gens), decode_real(data.get("cutoff", "inf")), float(data.get("tol", DEFAULT_TOL)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed index-set record: {exc}") from exc


def encode_real(x: Real):
    # exact numbers (ints included) travel as strings so they decode to Fraction
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return str(x)
    if x == INF:
        return "inf"
    return x


def decode_real(x) -> Real:
    if isinstance(x, str):
        if x.strip() in ("inf", "+inf", "Infinity"):
            return INF
        return Fraction(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return float(x)


EMPTY = TruncatedIndexSet((), INF, 0.0)
N0 = TruncatedIndexSet((IndexPoint(ComplexExponent(0), 0),), INF, 0.0)


def natural_numbers(tol: float = 0.0) -> TruncatedIndexSet:
    return TruncatedIndexSet(N0.generators, INF, tol)


def empty(tol: float = 0.0) -> TruncatedIndexSet:
    return TruncatedIndexSet((), INF, tol)


# ---------------------------------------------------------------- basic ops


def min_re(E: TruncatedIndexSet) -> Real:
    return min((g.z.re for g in E.generators), default=INF)


def closure_members(E: TruncatedIndexSet, C: Real) -> list[IndexPoint]:
    """All elements of E with Re z < C, sorted by (Re z, Im z, k)."""
    if C > E.cutoff:
        raise CutoffExceeded(f"requested bound {_fmt(C)} exceeds validity cutoff {_fmt(E.cutoff)}")
    classes = _Classes(E.tol)
    prof = _profiles(classes, E.generators)
    out = []
    for c, steps in prof.items():
        rep = classes.reps[c]
        offsets = sorted(steps)
        run = -1
        o = offsets[0]
        it = iter(offsets)
        next_bp = next(it, None)
        while True:
            z = rep + o
            if z.re >= C:
                break
            while next_bp is not None and next_bp <= o:
                run = max(run, steps[next_bp])
                next_bp = next(it, None)
            out.extend(IndexPoint(z, k) for k in range(run + 1))
            o += 1
    out.sort(key=IndexPoint.sort_key)
    return out


def member_keys(E: TruncatedIndexSet, C: Real) -> set[tuple[Real, Real, int]]:
    return {(p.z.re, p.z.im, p.k) for p in closure_members(E, C)}


def sum_(E: TruncatedIndexSet, F: TruncatedIndexSet) -> TruncatedIndexSet:
    """E + F = {(z1 + z2, k1 + k2)}."""
    cutoff = min(E.cutoff + min_re(F), F.cutoff + min_re(E))
    gens = [IndexPoint(a.z + b.z, a.k + b.k) for a in E.generators for b in F.generators]
    return TruncatedIndexSet(tuple(gens), cutoff, max(E.tol, F.tol))


def union(E: TruncatedIndexSet, F: TruncatedIndexSet) -> TruncatedIndexSet:
    return TruncatedIndexSet(E.generators + F.generators, min(E.cutoff, F.cutoff), max(E.tol, F.tol))


def extended_union(E: TruncatedIndexSet, F: TruncatedIndexSet) -> TruncatedIndexSet:
    """E vee F: union plus (z, k1 + k2 + 1) at every shared exponent z."""
    tol = max(E.tol, F.tol)
    cutoff = min(E.cutoff, F.cutoff)
    classes = _Classes(tol)
    pe = _profiles(classes, E.generators)
    pf = _profiles(classes, F.generators)
    result: dict[int, dict[int, int]] = {}
    for c in set(pe) | set(pf):
        se, sf = pe.get(c, {}), pf.get(c, {})
        offsets = sorted(set(se) | set(sf))
        ke, kf = _running_max(se, offsets), _running_max(sf, offsets)
        steps = {}
        for o, a, b in zip(offsets, ke, kf):
            steps[o] = b if a < 0 else a if b < 0 else a + b + 1
        result[c] = steps
    gens = _generators_from_profiles(classes, result, cutoff)
    return TruncatedIndexSet(gens, cutoff, tol, _canonical=True)


def shift(E: TruncatedIndexSet, c) -> TruncatedIndexSet:
    """Translate every element by the exponent c."""
    c = ComplexExponent.of(c)
    gens = tuple(IndexPoint(g.z + c, g.k) for g in E.generators)
    return TruncatedIndexSet(gens, E.cutoff + c.re, E.tol)


def shift_int(E: TruncatedIndexSet, j: int) -> TruncatedIndexSet:
    """E + j, i.e. E + {(j', 0) : j' >= j}."""
    if int(j) != j or j < 0:
        raise ValidationError(f"integer shift must be a nonnegative integer, got {j}")
    return shift(E, int(j))


def from_half_spectrum(points, C: Real = INF, tol: float = DEFAULT_TOL) -> TruncatedIndexSet:
    """Smallest index set containing the given (z, k) pairs; no logs are added."""
    return TruncatedIndexSet.from_points(points, C, tol)


# ---------------------------------------------------------------- generated families


def hat_iteration(E: TruncatedIndexSet, C: Real) -> tuple[TruncatedIndexSet, int]:
    """Union of E(j) = E vee (E(j-1) + 1) below C, and the stabilization index."""
    bound = min(C, E.cutoff)
    base = E.truncate(bound)
    if not base:
        return base, 0
    if bound == INF:
        raise ValidationError("generated families need a finite bound C")
    current = base
    limit = int(math.ceil(bound - min_re(base))) + 2
    for j in range(1, limit + 1):
        nxt = extended_union(base, shift(current, 1)).truncate(bound)
        if nxt.same_generators(current):
            return current, j - 1
        current = nxt
    raise AssertionError("hat recursion failed to stabilize")  # each step moves new content up by one


def generate_hat(E: TruncatedIndexSet, C: Real) -> TruncatedIndexSet:
    return hat_iteration(E, C)[0]


def flat_iteration(Ehat: TruncatedIndexSet, C: Real) -> tuple[TruncatedIndexSet, int]:
    """Ehat vee (Ehat + 1) vee (Ehat + 2) vee ... below C."""
    bound = min(C, Ehat.cutoff)
    base = Ehat.truncate(bound)
    current, j = base, 0
    if base and bound == INF:
        raise ValidationError("generated families need a finite bound C")
    if base:
        lo = min_re(base)
        while lo + j + 1 < bound:
            j += 1
            current = extended_union(current, shift(base, j)).truncate(bound)
    return current, j


def generate_flat(Ehat: TruncatedIndexSet, C: Real) -> TruncatedIndexSet:
    return flat_iteration(Ehat, C)[0]


def generate_sharp(Eflat: TruncatedIndexSet, Ehat: TruncatedIndexSet, C: Real) -> TruncatedIndexSet:
    return extended_union(Eflat, shift(Ehat, 1)).truncate(C)


def generate_ff(Ehat_other: TruncatedIndexSet, Eflat: TruncatedIndexSet, n: int, C: Real) -> TruncatedIndexSet:
    """N0 vee (Ehat_other + Eflat + (n - 1)); validity follows the sum's cutoff."""
    inner = shift_int(sum_(Ehat_other, Eflat), n - 1)
    return extended_union(natural_numbers(inner.tol), inner).truncate(C)
