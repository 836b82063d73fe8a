"""Command-line front end.

Every subcommand prints either a human-readable table (default) or a
canonical JSON report (``--format machine``).  Failures print one line to
stderr and exit with the code of their error family: 2 invalid input,
3 tolerance ambiguity, 4 not fully elliptic or weight on the spectrum,
5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .composition import DEFAULT_DELTA, IndexTriple, WeightTriple, compose_0, compose_bounds, compose_bsc
from .errors import (
    EllipticityError,
    NumericalError,
    ResonanceWarning,
    ValidationError,
    ZeroCalcError,
    exit_code_for,
)
from .exprcalc import evaluate
from .indexset import DEFAULT_TOL, TruncatedIndexSet, closure_members, encode_real
from .normal_op import bessel_oracle, build_reduced, invertibility, sweep_invertibility
from .normal_op.bases import DEFAULT_EPS_RANK, DEFAULT_T0, DEFAULT_T_MAX
from .planner import (
    canonical_json,
    plan_bounds,
    plan_generalized_inverse,
    plan_normal_inverse,
    plan_parametrix,
    render_table,
    report,
    serialize_plan,
)
from .spectrum import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_ELL_EPS,
    ZeroOpSpec,
    boundary_spectrum,
    ellipticity_check,
    half_spectra,
    hyperbolic_operator,
    indicial_family,
    require_constant_spectrum,
    root_residuals,
    spectrum_variation,
)

DEFAULT_CUTOFF = 6.0
PLAN_MODES = ("parametrix", "normal-inverse", "gen-inverse", "bounds")


# ------------------------------------------------------------------ argument helpers


def _real(text: str, exact: bool):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a real number: {text!r}") from exc
    return v if exact else float(v)


def _alpha_range(text: str) -> list[float]:
    """``a:b:step`` inclusive of b (up to rounding), or a comma list."""
    try:
        if ":" in text:
            a, b, h = (float(x) for x in text.split(":"))
            if h <= 0 or b < a:
                raise ValueError
            k = int(np.floor((b - a) / h + 1e-9))
            return [round(a + i * h, 12) for i in range(k + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"alpha range must be 'start:stop:step' or a comma list, got {text!r}") from exc


def _eta(text: str | None, n: int):
    if text is None:
        return None
    grid = []
    for part in text.split(";"):
        try:
            grid.append(tuple(float(x) for x in part.split(",")))
        except ValueError as exc:
            raise ValidationError(f"bad eta vector {part!r}") from exc
    return grid


def _tolerances(args) -> dict:
    keys = ("tol", "cluster_tol", "eps_rank", "delta")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _cutoff(args, exact: bool):
    C = _real(args.cutoff, exact)
    if not C > 0:
        raise ValidationError(f"cutoff must be positive, got {args.cutoff}")
    return C


def _positive(name: str, v) -> None:
    if v is not None and not v > 0:
        raise ValidationError(f"{name} must be positive, got {v}")


def _emit(args, record: dict, table: str) -> None:
    if args.format == "machine":
        record = dict(record)
        record["tolerances"] = _tolerances(args)
        sys.stdout.write(canonical_json(record))
    else:
        sys.stdout.write(table)


def _z(z) -> str:
    return f"{encode_real(z.re)} {'+' if z.im >= 0 else '-'} {encode_real(abs(z.im))}i"


# ------------------------------------------------------------------ commands


def _load_spectrum(args, op: ZeroOpSpec):
    spec = require_constant_spectrum(op, args.cluster_tol)
    if args.exact:
        spec = boundary_spectrum(indicial_family(op, 0), args.cluster_tol, exact=True)
    return spec


def _require_elliptic(op: ZeroOpSpec) -> None:
    for y in range(op.num_samples):
        rep = ellipticity_check(op, y_index=y)
        if not rep.elliptic:
            raise EllipticityError(
                f"principal symbol is not elliptic at sample {y}: min |sigma| = {rep.min_abs_symbol:.3g} "
                f"at {list(rep.witness)}, threshold {DEFAULT_ELL_EPS:g}"
            )


def cmd_spectrum(args) -> int:
    op = ZeroOpSpec.load(args.file)
    poly = indicial_family(op, args.y_index)
    spec = boundary_spectrum(poly, args.cluster_tol, exact=args.exact)
    res = root_residuals(poly, spec)
    ell = ellipticity_check(op, y_index=args.y_index)
    var = spectrum_variation(op, args.cluster_tol)
    rec = {
        "command": "spectrum",
        "y_index": args.y_index,
        "spectrum": spec.to_dict(),
        "residuals": res,
        "elliptic": ell.elliptic,
        "min_abs_symbol": ell.min_abs_symbol,
        "spectrum_constant": var.constant,
        "max_spectrum_variation": var.max_distance,
    }
    lines = [f"boundary spectrum at sample {args.y_index} ({'exact' if spec.exact else 'numeric'})",
             f"  {'z':>28} {'mult':>5} {'residual':>10}"]
    for (z, m), r in zip(spec.roots, res):
        lines.append(f"  {_z(z):>28} {m:>5} {r:>10.2e}")
    lines.append(f"elliptic symbol: {ell.elliptic} (min |sigma| = {ell.min_abs_symbol:.4g})")
    lines.append(f"spectrum constant over samples: {var.constant} (max distance {var.max_distance:.3g})")
    if args.alpha is not None:
        alpha = _real(args.alpha, spec.exact)
        Ep, Em = half_spectra(spec, alpha, args.tol)
        rec["E_plus"], rec["E_minus"] = Ep.to_dict(), Em.to_dict()
        lines.append(f"E_+ = {Ep}")
        lines.append(f"E_- = {Em}")
    _emit(args, rec, "\n".join(lines) + "\n")
    return 0


def _plan(args, mode: str) -> int:
    op = ZeroOpSpec.load(args.file)
    if mode == "bounds":
        if args.alpha0 is None or args.alpha1 is None:
            raise ValidationError("bounds mode needs --alpha0 and --alpha1")
        a = None if args.alpha is None else float(Fraction(args.alpha))
        plan = plan_bounds(float(Fraction(args.alpha0)), float(Fraction(args.alpha1)), op.n, a)
        rec = {"command": "plan", "mode": mode, "plan": serialize_plan(plan)}
        _emit(args, rec, render_table(plan))
        return 0
    if args.alpha is None:
        raise ValidationError(f"{mode} mode needs --alpha")
    _require_elliptic(op)
    spec = _load_spectrum(args, op)
    alpha = _real(args.alpha, spec.exact)
    C = _cutoff(args, spec.exact)
    build = {"parametrix": plan_parametrix, "normal-inverse": plan_normal_inverse,
             "gen-inverse": plan_generalized_inverse}[mode]
    plan = build(spec, alpha, op.n, C, args.tol)
    rec = {"command": "plan", "mode": mode, "plan": serialize_plan(plan), "report": report(plan)}
    _emit(args, rec, render_table(plan))
    return 0


def cmd_plan(args) -> int:
    return _plan(args, args.mode)


def cmd_compose(args) -> int:
    try:
        data = json.loads(Path(args.file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read composition input {args.file}: {exc}") from exc
    for key in ("n", "E", "F"):
        if key not in data:
            raise ValidationError(f"composition input is missing field '{key}'")
    n = data["n"]
    calculus = data.get("calculus", "0")
    if calculus == "bounds":
        w = lambda d: WeightTriple(*(float(Fraction(str(d[k]))) for k in ("lb", "ff", "rb")))
        g = compose_bounds(w(data["E"]), w(data["F"]), n, args.delta, args.tol)
        rec = {"command": "compose", "calculus": calculus, "weights": [g.lb, g.ff, g.rb]}
        _emit(args, rec, f"composition weights: lb {g.lb:.10g}, ff {g.ff:.10g}, rb {g.rb:.10g}\n")
        return 0
    C = _cutoff(args, args.exact)

    def face(v, where):
        if isinstance(v, str):
            return evaluate(v, C, args.tol, args.exact)
        if isinstance(v, dict):
            return TruncatedIndexSet.from_dict(v)
        raise ValidationError(f"{where}: face must be an expression string or a set record")

    def triple(d, name):
        if not isinstance(d, dict):
            raise ValidationError(f"{name}: must be an object with lb, ff, rb")
        try:
            return IndexTriple(*(face(d[k], f"{name}.{k}") for k in ("lb", "ff", "rb")))
        except KeyError as exc:
            raise ValidationError(f"{name}: missing face {exc}") from exc

    E, F = triple(data["E"], "E"), triple(data["F"], "F")
    if calculus == "0":
        G = compose_0(E, F, n)
    elif calculus == "bsc":
        G = compose_bsc(E, F)
    else:
        raise ValidationError(f"calculus must be '0', 'bsc' or 'bounds', got {calculus!r}")
    G = G.truncate(C)
    rec = {"command": "compose", "calculus": calculus, "cutoff": encode_real(C), "result": G.to_dict()}
    lines = [f"composition ({calculus}-calculus), elements with Re z < {encode_real(C)}"]
    for k, S in G.faces().items():
        lines.append(f"  {k:>2}: {S}")
    _emit(args, rec, "\n".join(lines) + "\n")
    return 0


def cmd_indexset(args) -> int:
    C = _cutoff(args, args.exact)
    E = evaluate(args.expression, C, args.tol, args.exact)
    members = [[encode_real(p.z.re), encode_real(p.z.im), p.k] for p in closure_members(E, C)]
    rec = {"command": "indexset", "expression": args.expression, "set": E.to_dict(), "members": members}
    _emit(args, rec, f"{E}\n")
    return 0


def _numeric_opts(args) -> dict:
    _positive("t0", args.t0)
    _positive("t_max", args.t_max)
    _positive("eps_rank", args.eps_rank)
    return dict(t0=args.t0, t_max=args.t_max, eps_rank=args.eps_rank, tol=args.tol, cluster_tol=args.cluster_tol)


def cmd_invertibility(args) -> int:
    op = ZeroOpSpec.load(args.file)
    if args.alpha is None:
        raise ValidationError("invertibility needs --alpha")
    alpha = float(Fraction(args.alpha))
    etas = _eta(args.eta, op.n) or [None]
    opts = _numeric_opts(args)
    verdicts, lines = [], []
    for eta in etas:
        opN = build_reduced(op, args.y_index, eta)
        v = invertibility(opN, alpha, **opts)
        verdicts.append({"eta_hat": list(opN.eta_hat), **v.to_dict()})
        dims = "n/a" if v.kernel_dim is None else f"{v.kernel_dim}/{v.cokernel_dim}"
        lines.append(f"eta_hat = {list(opN.eta_hat)}: invertible = {v.invertible}, ker/coker = {dims}, "
                     f"flags = {v.diagnostics.get('flags', [])}")
    ok = all(v["invertible"] for v in verdicts)
    rec = {"command": "invertibility", "alpha": alpha, "verdicts": verdicts, "invertible": ok}
    _emit(args, rec, "\n".join(lines) + "\n")
    return 0 if ok else EllipticityError.exit_code


def cmd_sweep(args) -> int:
    op = ZeroOpSpec.load(args.file)
    alphas = _alpha_range(args.alpha_range)
    ys = range(op.num_samples) if args.all_samples else (args.y_index,)
    records = sweep_invertibility(op, alphas, _eta(args.eta, op.n), tuple(ys), **_numeric_opts(args))
    ok = bool(records) and all(r.invertible for r in records)
    errors = [r.error for r in records if r.error]
    rec = {"command": "sweep", "cells": [r.to_dict() for r in records], "fully_elliptic": ok}
    lines = [f"{'alpha':>8} {'y':>3} {'invertible':>10} {'ker':>4} {'coker':>5}  eta_hat"]
    for r in records:
        inv = "error" if r.error else str(r.invertible)
        fmt = lambda d: "-" if d is None else str(d)
        lines.append(f"{r.alpha:>8.4g} {r.y_index:>3} {inv:>10} {fmt(r.kernel_dim):>4} {fmt(r.cokernel_dim):>5}  "
                     f"{[round(x, 4) for x in r.eta_hat]}")
    lines.append(f"fully elliptic at every cell: {ok}")
    _emit(args, rec, "\n".join(lines) + "\n")
    if errors and all(r.error for r in records):
        raise NumericalError(f"every sweep cell failed; first error: {errors[0]}")
    return 0 if ok else EllipticityError.exit_code


def cmd_oracle_check(args) -> int:
    if args.n is None or args.zeta is None:
        raise ValidationError("oracle-check needs --n and --zeta")
    n, zeta = args.n, float(Fraction(args.zeta))
    op = hyperbolic_operator(n, zeta)
    eta = (1.0,) + (0.0,) * (n - 2)
    opN = build_reduced(op, 0, eta)
    opts = _numeric_opts(args)
    cells, lines, agree = [], [f"{'alpha':>8} {'numeric':>12} {'oracle':>12}  agree"], True
    for a in _alpha_range(args.alpha_range):
        o = bessel_oracle(n, zeta, a, args.tol)
        v = invertibility(opN, a, **opts)
        same = (v.invertible, v.kernel_dim, v.cokernel_dim) == (o.invertible, o.kernel_dim, o.cokernel_dim)
        agree &= same
        cells.append({"alpha": a, "numeric": [v.invertible, v.kernel_dim, v.cokernel_dim],
                      "oracle": [o.invertible, o.kernel_dim, o.cokernel_dim], "agree": same})
        show = lambda x: f"{x.kernel_dim}/{x.cokernel_dim}" if x.kernel_dim is not None else "spectrum"
        lines.append(f"{a:>8.4g} {show(v):>12} {show(o):>12}  {same}")
    rec = {"command": "oracle-check", "n": n, "zeta": zeta, "cells": cells, "agree": agree}
    _emit(args, rec, "\n".join(lines) + "\n")
    if not agree:
        raise NumericalError("numerical verdicts disagree with the closed-form oracle")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "machine"), default="table")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="coincidence tolerance for exponents")
    common.add_argument("--cluster-tol", type=float, default=DEFAULT_CLUSTER_TOL)
    common.add_argument("--eps-rank", type=float, default=DEFAULT_EPS_RANK)
    common.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="weight loss at ties (bounds calculus)")
    common.add_argument("--exact", action="store_true", help="rational arithmetic throughout")

    p = argparse.ArgumentParser(prog="zerocalc", description="Index sets and normal-operator checks for 0-operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("file", help="operator spec (JSON)")
        return s

    def numeric(s):
        s.add_argument("--y-index", type=int, default=0)
        s.add_argument("--eta", help="unit vectors, components separated by ',' and vectors by ';'")
        s.add_argument("--t0", type=float, default=DEFAULT_T0)
        s.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)

    s = with_file("spectrum", "boundary spectrum and ellipticity screening")
    s.add_argument("--y-index", type=int, default=0)
    s.add_argument("--alpha")
    s.set_defaults(func=cmd_spectrum)

    def plan_args(s):
        s.add_argument("--alpha")
        s.add_argument("--cutoff", default=str(DEFAULT_CUTOFF))
        s.add_argument("--alpha0")
        s.add_argument("--alpha1")

    s = with_file("plan", "index sets of the parametrix construction")
    plan_args(s)
    s.add_argument("--mode", choices=PLAN_MODES, default="parametrix")
    s.set_defaults(func=cmd_plan)
    for name, mode in (("plan-gen-inverse", "gen-inverse"), ("plan-bounds", "bounds"), ("normal-inverse", "normal-inverse")):
        s = with_file(name, f"shorthand for plan --mode {mode}")
        plan_args(s)
        s.set_defaults(func=lambda a, m=mode: _plan(a, m))

    s = sub.add_parser("compose", parents=[common], help="compose two index triples or weight triples")
    s.add_argument("file", help="JSON with n, calculus ('0', 'bsc', 'bounds'), E and F")
    s.add_argument("--cutoff", default=str(DEFAULT_CUTOFF))
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("indexset", parents=[common], help="evaluate an index-set expression")
    s.add_argument("expression")
    s.add_argument("--cutoff", default=str(DEFAULT_CUTOFF))
    s.set_defaults(func=cmd_indexset)

    s = with_file("invertibility", "invertibility of the reduced normal operator at a weight")
    s.add_argument("--alpha")
    numeric(s)
    s.set_defaults(func=cmd_invertibility)

    s = with_file("sweep", "invertibility over a grid of weights and directions")
    s.add_argument("--alpha-range", required=True, help="start:stop:step or a comma list")
    s.add_argument("--all-samples", action="store_true", help="sweep every boundary sample")
    numeric(s)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("oracle-check", parents=[common], help="compare with the hyperbolic closed form")
    s.add_argument("--n", type=int)
    s.add_argument("--zeta")
    s.add_argument("--alpha-range", required=True)
    numeric(s)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResonanceWarning)
            return args.func(args)
    except ZeroCalcError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
