"""Invertibility at a weight, parameter sweeps and the hyperbolic oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import OracleInapplicable, ZeroCalcError
from ..indexset import DEFAULT_TOL
from ..spectrum import DEFAULT_CLUSTER_TOL, ZeroOpSpec
from .bases import DEFAULT_EPS_RANK, DEFAULT_RTOL, DEFAULT_T0, DEFAULT_T_MAX, kernel_dimension
from .reduced import ReducedNormalOp, build_reduced, formal_adjoint, indicial_spectrum


@dataclass
class InvertibilityVerdict:
    """Outcome of the three-part invertibility test at the weight alpha.

    ``kernel_dim`` counts solutions in t^alpha L^2(dt/t), ``cokernel_dim``
    those of the adjoint in t^(-alpha) L^2(dt/t).  Both are None when the
    weight lies on the indicial spectrum.
    """

    alpha: float
    invertible: bool
    condition_1_ok: bool
    kernel_dim: int | None
    cokernel_dim: int | None
    stable: bool = True
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "invertible": self.invertible,
            "condition_1_ok": self.condition_1_ok,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "stable": self.stable,
            "diagnostics": self.diagnostics,
        }


def _on_spectrum(opN: ReducedNormalOp, alpha: float, tol: float, cluster_tol: float):
    for z, _ in indicial_spectrum(opN, cluster_tol).roots:
        if abs(z.re - alpha) <= tol:
            return complex(z)
    return None


def invertibility(
    opN: ReducedNormalOp,
    alpha: float,
    t0: float = DEFAULT_T0,
    t_max: float = DEFAULT_T_MAX,
    eps_rank: float = DEFAULT_EPS_RANK,
    rtol: float = DEFAULT_RTOL,
    tol: float = DEFAULT_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    stability: bool = True,
) -> InvertibilityVerdict:
    hit = _on_spectrum(opN, alpha, tol, cluster_tol)
    if hit is not None:
        return InvertibilityVerdict(
            alpha, False, False, None, None, True,
            {"weight_on_spectrum": f"Re z = {hit.real:.12g} for z = {hit:.12g}"},
        )
    adj = formal_adjoint(opN)
    opts = dict(eps_rank=eps_rank, rtol=rtol, tol=tol, cluster_tol=cluster_tol)
    ker = kernel_dimension(opN, alpha, t0, t_max, **opts)
    cok = kernel_dimension(adj, -alpha, t0, t_max, **opts)
    diag = {
        "kernel_singular_values": ker.singular_values,
        "cokernel_singular_values": cok.singular_values,
        "zero_side_columns": [ker.r_zero, cok.r_zero],
        "infinity_side_columns": [ker.d_infinity, cok.d_infinity],
        "flags": sorted(set(ker.flags + cok.flags)),
        "t0": t0,
        "t_max": t_max,
        "eps_rank": eps_rank,
    }
    stable = True
    if stability:
        k2 = kernel_dimension(opN, alpha, t0 / 2, 2 * t_max, check=False, **opts)
        c2 = kernel_dimension(adj, -alpha, t0 / 2, 2 * t_max, check=False, **opts)
        diag["refined_dims"] = [k2.dim, c2.dim]
        stable = (k2.dim, c2.dim) == (ker.dim, cok.dim)
        if not stable:
            diag["flags"].append("unstable")
    return InvertibilityVerdict(alpha, stable and ker.dim == 0 and cok.dim == 0, True, ker.dim, cok.dim, stable, diag)


def bessel_oracle(n: int, zeta, alpha: float, tol: float = DEFAULT_TOL) -> InvertibilityVerdict:
    """Closed-form verdict for the hyperbolic family.

    Solutions are t^((n-1)/2) I_nu(t) ~ t^zeta and t^((n-1)/2) K_nu(t) ~
    t^(n-1-zeta) at 0, nu = zeta - (n-1)/2; only K decays at infinity.  The
    dt/t adjoint has exponents -conj(zeta) and conj(zeta) - (n-1) and again
    a single decaying solution, the one of the second kind.
    """
    z = complex(zeta)
    if n < 2:
        raise OracleInapplicable(f"the oracle needs a tangential variable, n = {n}")
    nu = z - (n - 1) / 2
    if not nu.real > tol:
        raise OracleInapplicable(f"need Re zeta > (n - 1)/2, got zeta = {zeta}")
    lo, hi = (n - 1) - z.real, z.real
    if abs(alpha - lo) <= tol or abs(alpha - hi) <= tol:
        return InvertibilityVerdict(alpha, False, False, None, None, True, {"oracle": "weight on spectrum"})
    ker = 1 if alpha < lo else 0
    cok = 1 if alpha > hi else 0
    return InvertibilityVerdict(alpha, ker == 0 and cok == 0, True, ker, cok, True, {"oracle": "bessel"})


@dataclass
class SweepRecord:
    alpha: float
    eta_hat: tuple[float, ...]
    y_index: int
    invertible: bool | None
    kernel_dim: int | None
    cokernel_dim: int | None
    flags: list[str] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "eta_hat": list(self.eta_hat),
            "y_index": self.y_index,
            "invertible": self.invertible,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "flags": self.flags,
            "error": self.error,
        }


def default_eta_grid(n: int, count: int = 8, seed: int = 0) -> list[tuple[float, ...]]:
    """Unit vectors in R^(n-1): +-1 for n = 2, angles for n = 3, random otherwise."""
    if n == 1:
        return [()]
    if n == 2:
        return [(1.0,), (-1.0,)]
    if n == 3:
        th = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return [(float(np.cos(a)), float(np.sin(a))) for a in th]
    v = np.random.default_rng(seed).standard_normal((count, n - 1))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return [tuple(float(x) for x in row) for row in v]


def sweep_invertibility(op: ZeroOpSpec, alphas, eta_grid=None, y_indices=(0,), **kw) -> list[SweepRecord]:
    """Verdict for every (alpha, eta_hat, y); per-cell errors are recorded, not raised."""
    eta_grid = default_eta_grid(op.n) if eta_grid is None else eta_grid
    out = []
    for y in y_indices:
        for eta in eta_grid:
            try:
                opN = build_reduced(op, y, eta)
            except ZeroCalcError as exc:
                out.extend(SweepRecord(a, tuple(eta), y, None, None, None, [], f"{type(exc).__name__}: {exc}") for a in alphas)
                continue
            for a in alphas:
                try:
                    v = invertibility(opN, a, **kw)
                    out.append(SweepRecord(a, tuple(eta), y, v.invertible, v.kernel_dim, v.cokernel_dim,
                                           list(v.diagnostics.get("flags", []))
                                           + ([] if v.condition_1_ok else ["weight-on-spectrum"])))
                except ZeroCalcError as exc:
                    out.append(SweepRecord(a, tuple(eta), y, None, None, None, [], f"{type(exc).__name__}: {exc}"))
    return out


def fully_elliptic(records: list[SweepRecord]) -> bool:
    return bool(records) and all(r.invertible for r in records)
