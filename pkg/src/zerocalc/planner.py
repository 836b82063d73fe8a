"""Index-set pipelines for parametrices and generalized inverses.

Given a boundary spectrum, a weight alpha and the dimension n, the planner
builds the half-spectrum sets E_+/E_-, their generated families (hat, flat,
sharp, front-face sets) and assembles the index sets of every operator in
the construction.  All sets are reported below a user cutoff C; internally
they are computed below a larger working bound so that sums and negative
shifts stay exact down to C.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .composition import IndexTriple
from .errors import CutoffExceeded, InvalidWindow, ValidationError
from .indexset import (
    DEFAULT_TOL,
    INF,
    TruncatedIndexSet,
    closure_members,
    decode_real,
    encode_real,
    extended_union,
    flat_iteration,
    generate_ff,
    generate_sharp,
    hat_iteration,
    min_re,
    natural_numbers,
    shift,
    shift_int,
    sum_,
    union,
)
from .spectrum import BoundarySpectrum, half_spectra

EMPTY_FACE = "∅ (infinite-order vanishing)"


def _exact_alpha(spec: BoundarySpectrum, alpha):
    if spec.exact and isinstance(alpha, float):
        return Fraction(repr(alpha))
    if isinstance(alpha, int):
        return Fraction(alpha)
    return alpha


def _working_bound(C, alpha, Ep, Em):
    lo = lambda E: max(0, -min_re(E)) if E else 0
    return C + 2 * abs(alpha) + lo(Ep) + lo(Em) + 1


def _cut(E: TruncatedIndexSet, C) -> TruncatedIndexSet:
    if E.cutoff < C:
        raise CutoffExceeded(f"internal set is only valid below {E.cutoff}, cannot report below {C}")
    return E.truncate(C)


@dataclass(frozen=True)
class Families:
    """E_+/E_- and their generated families, below the working bound."""

    E_plus: TruncatedIndexSet
    E_minus: TruncatedIndexSet
    hat_plus: TruncatedIndexSet
    hat_minus: TruncatedIndexSet
    flat_plus: TruncatedIndexSet
    flat_minus: TruncatedIndexSet
    sharp_plus: TruncatedIndexSet
    sharp_minus: TruncatedIndexSet
    ff_plus: TruncatedIndexSet
    ff_minus: TruncatedIndexSet
    bound: object
    iterations: dict = field(default_factory=dict, compare=False)

    def truncated(self, C) -> dict[str, TruncatedIndexSet]:
        names = ("E_plus", "E_minus", "hat_plus", "hat_minus", "flat_plus", "flat_minus",
                 "sharp_plus", "sharp_minus", "ff_plus", "ff_minus")
        return {k: _cut(getattr(self, k), C) for k in names}


def compute_families(spec: BoundarySpectrum, alpha, n: int, C, tol: float = DEFAULT_TOL) -> Families:
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    if not C > 0 or C == INF:
        raise ValidationError(f"cutoff must be positive and finite, got {C}")
    Ep, Em = half_spectra(spec, alpha, tol)
    W = _working_bound(C, alpha, Ep, Em)
    Ep, Em = Ep.with_cutoff(W), Em.with_cutoff(W)
    hp, jhp = hat_iteration(Ep, W)
    hm, jhm = hat_iteration(Em, W)
    fp, jfp = flat_iteration(hp, W)
    fm, jfm = flat_iteration(hm, W)
    sp_, sm_ = generate_sharp(fp, hp, W), generate_sharp(fm, hm, W)
    ffm = generate_ff(hp, fm, n, W)  # N0 vee (hat_+ + flat_- + (n-1))
    ffp = generate_ff(hm, fp, n, W)
    its = {"hat_plus": jhp, "hat_minus": jhm, "flat_plus": jfp, "flat_minus": jfm}
    return Families(Ep, Em, hp, hm, fp, fm, sp_, sm_, ffp, ffm, W, its)


def _triple_cut(lb, ff, rb, C) -> IndexTriple:
    return IndexTriple(_cut(lb, C), _cut(ff, C), _cut(rb, C))


# ------------------------------------------------------------------ plan types


@dataclass(frozen=True)
class ParametrixPlan:
    """Index sets of left/right parametrices, error terms and the normal inverse."""

    Q: IndexTriple
    Qprime: IndexTriple
    R_rb: TruncatedIndexSet
    Rprime_lb: TruncatedIndexSet
    Pminus: IndexTriple
    cutoff: object
    alpha: object
    n: int
    spectrum: BoundarySpectrum
    tol: float = DEFAULT_TOL
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "parametrix"

    def faces(self) -> dict[str, TruncatedIndexSet]:
        out = {}
        for name in ("Q", "Qprime"):
            for f, E in getattr(self, name).faces().items():
                out[f"{name}.{f}"] = E
        out["R.lb"] = TruncatedIndexSet((), INF, self.tol)
        out["R.rb"] = self.R_rb
        out["Rprime.lb"] = self.Rprime_lb
        out["Rprime.rb"] = TruncatedIndexSet((), INF, self.tol)
        for f, E in self.Pminus.faces().items():
            out[f"Pminus.{f}"] = E
        return out


@dataclass(frozen=True)
class GeneralizedInversePlan:
    G: IndexTriple
    Pi: tuple[TruncatedIndexSet, TruncatedIndexSet]
    Piprime: tuple[TruncatedIndexSet, TruncatedIndexSet]
    invertible_branch: IndexTriple
    cutoff: object
    alpha: object
    n: int
    spectrum: BoundarySpectrum
    tol: float = DEFAULT_TOL
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "gen-inverse"

    def faces(self) -> dict[str, TruncatedIndexSet]:
        out = {f"G.{f}": E for f, E in self.G.faces().items()}
        out["Pi.lb"], out["Pi.rb"] = self.Pi
        out["Piprime.lb"], out["Piprime.rb"] = self.Piprime
        out.update({f"Ginv.{f}": E for f, E in self.invertible_branch.faces().items()})
        return out


@dataclass(frozen=True)
class NormalInversePlan:
    Pminus: IndexTriple
    cutoff: object
    alpha: object
    n: int
    spectrum: BoundarySpectrum
    tol: float = DEFAULT_TOL
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "normal-inverse"

    def faces(self) -> dict[str, TruncatedIndexSet]:
        return {f"Pminus.{f}": E for f, E in self.Pminus.faces().items()}


@dataclass(frozen=True)
class BoundsPlan:
    """Weights (lb, rb) for the calculus-with-bounds construction."""

    alpha0: float
    alpha1: float
    n: int
    Q: tuple[float, float]
    R: tuple[float, float]
    Rprime: tuple[float, float]
    alpha: float | None = None
    beta_lb: float | None = None
    beta_rb: float | None = None

    kind = "bounds"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha0": encode_real(self.alpha0),
            "alpha1": encode_real(self.alpha1),
            "n": self.n,
            "Q": [encode_real(v) for v in self.Q],
            "Qprime": [encode_real(v) for v in self.Q],
            "R": [encode_real(v) for v in self.R],
            "Rprime": [encode_real(v) for v in self.Rprime],
            "alpha": None if self.alpha is None else encode_real(self.alpha),
            "beta_lb": None if self.beta_lb is None else encode_real(self.beta_lb),
            "beta_rb": None if self.beta_rb is None else encode_real(self.beta_rb),
        }


# ------------------------------------------------------------------ planners


def plan_parametrix(spec: BoundarySpectrum, alpha, n: int, cutoff, tol: float = DEFAULT_TOL) -> ParametrixPlan:
    """Left and right parametrices with their residual error terms."""
    alpha = _exact_alpha(spec, alpha)
    fam = compute_families(spec, alpha, n, cutoff, tol)
    C = cutoff
    Q = _triple_cut(fam.hat_plus, fam.ff_minus, shift_int(fam.sharp_minus, n - 1), C)
    Qp = _triple_cut(fam.sharp_plus, fam.ff_plus, shift_int(fam.hat_minus, n - 1), C)
    R_rb = _cut(shift_int(fam.flat_minus, n - 1), C)
    Rp_lb = _cut(fam.flat_plus, C)
    N0 = natural_numbers(fam.E_plus.tol)
    Pm = _triple_cut(fam.hat_plus, N0, shift_int(fam.hat_minus, n - 1), C)
    diag = {"iterations": dict(fam.iterations), "working_bound": fam.bound}
    return ParametrixPlan(Q, Qp, R_rb, Rp_lb, Pm, C, alpha, n, spec, tol, diag)


def plan_normal_inverse(spec: BoundarySpectrum, alpha, n: int, cutoff, tol: float = DEFAULT_TOL) -> NormalInversePlan:
    alpha = _exact_alpha(spec, alpha)
    fam = compute_families(spec, alpha, n, cutoff, tol)
    N0 = natural_numbers(fam.E_plus.tol)
    Pm = _triple_cut(fam.hat_plus, N0, shift_int(fam.hat_minus, n - 1), cutoff)
    diag = {"iterations": {k: v for k, v in fam.iterations.items() if k.startswith("hat")}, "working_bound": fam.bound}
    return NormalInversePlan(Pm, cutoff, alpha, n, spec, tol, diag)


def plan_generalized_inverse(
    spec: BoundarySpectrum, alpha, n: int, cutoff, tol: float = DEFAULT_TOL
) -> GeneralizedInversePlan:
    """Index sets of the generalized inverse G and the projections Pi, Pi'.

    The doubled sets 2(E - alpha) in the front-face formula are taken as
    Minkowski sums (E + E) - 2 alpha.
    """
    alpha = _exact_alpha(spec, alpha)
    fam = compute_families(spec, alpha, n, cutoff, tol)
    C = cutoff
    N0 = natural_numbers(fam.E_plus.tol)
    hp, hm = fam.hat_plus, fam.hat_minus
    sharp_sum = shift_int(sum_(fam.sharp_plus, fam.sharp_minus), n - 1)
    ff_hat = extended_union(N0, sharp_sum)
    d_plus = shift(sum_(fam.flat_plus, fam.flat_plus), -2 * alpha)
    d_minus = shift(sum_(fam.flat_minus, fam.flat_minus), 2 * alpha)
    inner = shift_int(sum_(ff_hat, union(d_plus, d_minus)), n - 1)
    E_ff = union(ff_hat, extended_union(inner, sharp_sum))
    G = _triple_cut(
        extended_union(hp, shift(hm, 2 * alpha)),
        E_ff,
        shift_int(extended_union(hm, shift(hp, -2 * alpha)), n - 1),
        C,
    )
    Pi = (_cut(hp, C), _cut(shift(hp, -2 * alpha + (n - 1)), C))
    Pip = (_cut(shift(hm, 2 * alpha), C), _cut(shift_int(hm, n - 1), C))
    inv = _triple_cut(hp, ff_hat, shift_int(hm, n - 1), C)
    diag = {"iterations": dict(fam.iterations), "working_bound": fam.bound}
    return GeneralizedInversePlan(G, Pi, Pip, inv, C, alpha, n, spec, tol, diag)


def plan_bounds(alpha0, alpha1, n: int, alpha=None) -> BoundsPlan:
    """Weights of Q, Q', R, R' and, for alpha in the window, of the generalized inverse."""
    if not alpha0 < alpha1:
        raise InvalidWindow(f"need alpha0 < alpha1, got alpha0 = {alpha0}, alpha1 = {alpha1}")
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    q = (alpha1, -alpha0 + (n - 1))
    beta_lb = beta_rb = None
    if alpha is not None:
        if not alpha0 <= alpha <= alpha1:
            raise InvalidWindow(f"alpha = {alpha} is outside the window [{alpha0}, {alpha1}]")
        beta_lb = min(alpha1, -alpha0 + (n - 1) + 2 * alpha)
        beta_rb = beta_lb - 2 * alpha + (n - 1)
    return BoundsPlan(alpha0, alpha1, n, q, (INF, q[1]), (alpha1, INF), alpha, beta_lb, beta_rb)


# ------------------------------------------------------------------ reports


def _meta(plan) -> dict:
    return {
        "kind": plan.kind,
        "alpha": encode_real(plan.alpha),
        "n": plan.n,
        "cutoff": encode_real(plan.cutoff),
        "tol": plan.tol,
        "spectrum": plan.spectrum.to_dict(),
    }


def serialize_plan(plan) -> dict:
    """Machine-readable record; parse_plan inverts it."""
    if isinstance(plan, BoundsPlan):
        return plan.to_dict()
    out = _meta(plan)
    out["faces"] = {k: v.to_dict() for k, v in plan.faces().items()}
    diag = dict(plan.diagnostics)
    if "working_bound" in diag:
        diag["working_bound"] = encode_real(diag["working_bound"])
    out["diagnostics"] = diag
    return out


def _spectrum_from_dict(d) -> BoundarySpectrum:
    from .indexset import ComplexExponent

    roots = tuple((ComplexExponent(decode_real(r["re"]), decode_real(r["im"])), r["mult"]) for r in d["roots"])
    return BoundarySpectrum(roots, d.get("cluster_tol", 0.0))


def parse_plan(data: dict):
    try:
        kind = data["kind"]
        if kind == "bounds":
            dec = lambda v: None if v is None else decode_real(v)
            return BoundsPlan(
                dec(data["alpha0"]), dec(data["alpha1"]), data["n"],
                tuple(dec(v) for v in data["Q"]), tuple(dec(v) for v in data["R"]),
                tuple(dec(v) for v in data["Rprime"]),
                dec(data["alpha"]), dec(data["beta_lb"]), dec(data["beta_rb"]),
            )
        faces = {k: TruncatedIndexSet.from_dict(v) for k, v in data["faces"].items()}
        common = dict(
            cutoff=decode_real(data["cutoff"]),
            alpha=decode_real(data["alpha"]),
            n=data["n"],
            spectrum=_spectrum_from_dict(data["spectrum"]),
            tol=data["tol"],
        )
        diag = dict(data.get("diagnostics", {}))
        if "working_bound" in diag:
            diag["working_bound"] = decode_real(diag["working_bound"])
        tri = lambda p: IndexTriple(faces[f"{p}.lb"], faces[f"{p}.ff"], faces[f"{p}.rb"])
        if kind == "parametrix":
            return ParametrixPlan(tri("Q"), tri("Qprime"), faces["R.rb"], faces["Rprime.lb"], tri("Pminus"),
                                  diagnostics=diag, **common)
        if kind == "normal-inverse":
            return NormalInversePlan(tri("Pminus"), diagnostics=diag, **common)
        if kind == "gen-inverse":
            return GeneralizedInversePlan(
                tri("G"), (faces["Pi.lb"], faces["Pi.rb"]), (faces["Piprime.lb"], faces["Piprime.rb"]),
                tri("Ginv"), diagnostics=diag, **common,
            )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed plan record: {exc}") from exc
    raise ValidationError(f"unknown plan kind {kind!r}")


def canonical_json(record) -> str:
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if x == INF:
        return "inf"
    return f"{float(x):.10g}"


def report(plan, C=None) -> dict:
    """Elements of every face below C (default: the plan cutoff)."""
    if isinstance(plan, BoundsPlan):
        return {"kind": "bounds", "plan": plan.to_dict()}
    C = plan.cutoff if C is None else C
    if C > plan.cutoff:
        raise CutoffExceeded(f"report bound {_fmt(C)} exceeds plan cutoff {_fmt(plan.cutoff)}")
    faces = {}
    for name, E in plan.faces().items():
        faces[name] = [[encode_real(p.z.re), encode_real(p.z.im), p.k] for p in closure_members(E, C)]
    rec = _meta(plan)
    rec["report_bound"] = encode_real(C)
    rec["members"] = faces
    rec["generators"] = {k: v.to_dict()["generators"] for k, v in plan.faces().items()}
    return rec


def render_table(plan, C=None) -> str:
    if isinstance(plan, BoundsPlan):
        d = plan.to_dict()
        lines = [f"window [{_fmt(plan.alpha0)}, {_fmt(plan.alpha1)}], n = {plan.n}"]
        for key in ("Q", "Qprime", "R", "Rprime"):
            lb, rb = d[key]
            lines.append(f"{key:<8} lb weight {lb:>8}   rb weight {rb:>8}")
        if plan.alpha is not None:
            lines.append(f"alpha = {_fmt(plan.alpha)}: beta_lb = {_fmt(plan.beta_lb)}, beta_rb = {_fmt(plan.beta_rb)}")
        return "\n".join(lines) + "\n"
    C = plan.cutoff if C is None else C
    if C > plan.cutoff:
        raise CutoffExceeded(f"report bound {_fmt(C)} exceeds plan cutoff {_fmt(plan.cutoff)}")
    lines = [f"{plan.kind} plan: alpha = {_fmt(plan.alpha)}, n = {plan.n}, elements with Re z < {_fmt(C)}"]
    for name, E in plan.faces().items():
        lines.append("")
        lines.append(f"[{name}]")
        members = closure_members(E, C)
        if not E.generators:
            lines.append(f"  {EMPTY_FACE}")
            continue
        if not members:
            lines.append(f"  (no elements with Re z < {_fmt(C)})")
            continue
        lines.append(f"  {'Re z':>12} {'Im z':>12} {'k':>4}")
        for p in members:
            lines.append(f"  {_fmt(p.z.re):>12} {_fmt(p.z.im):>12} {p.k:>4}")
    return "\n".join(lines) + "\n"
