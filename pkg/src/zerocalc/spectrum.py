"""Operator specs, indicial polynomials and boundary spectra.

An operator of order m in dimension n is described by its boundary
coefficients a_{j,beta} of (x D_x)^j (x D_y)^beta, frozen at a boundary
point.  Its indicial polynomial is I(sigma) = sum_j a_{j,0} sigma^j and a
root sigma gives the boundary exponent z = i sigma.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import sympy as sp
from scipy.optimize import linear_sum_assignment, minimize

from .errors import (
    ClusterAmbiguity,
    DegenerateLeading,
    NonConstantSpectrum,
    SpecFormatError,
    ValidationError,
    WeightOnSpectrum,
)
from .indexset import (
    DEFAULT_TOL,
    ComplexExponent,
    IndexPoint,
    TruncatedIndexSet,
    as_point,
    encode_real,
    from_half_spectrum,
)

DEFAULT_CLUSTER_TOL = 1e-7
DEFAULT_ELL_EPS = 1e-8
DEFAULT_SPHERE_SAMPLES = 10_000
LEADING_THRESHOLD = 1e-12

Term = tuple[int, tuple[int, ...]]


def _coeff_table(entries, n: int, m: int, path: str) -> tuple[tuple[Term, complex], ...]:
    if not isinstance(entries, (list, tuple)):
        raise SpecFormatError("expected a list of coefficient records", path)
    slots = n - 1
    table: dict[Term, complex] = {}
    for i, rec in enumerate(entries):
        here = f"{path}[{i}]"
        if not isinstance(rec, dict):
            raise SpecFormatError("expected an object with keys j, beta, re, im", here)
        for key in ("j", "re"):
            if key not in rec:
                raise SpecFormatError(f"missing field '{key}'", here)
        j = rec["j"]
        if not isinstance(j, int) or isinstance(j, bool) or j < 0:
            raise SpecFormatError("must be a nonnegative integer", f"{here}.j")
        beta = rec.get("beta", [])
        if not isinstance(beta, list) or not all(isinstance(b, int) and not isinstance(b, bool) and b >= 0 for b in beta):
            raise SpecFormatError("must be a list of nonnegative integers", f"{here}.beta")
        if len(beta) > slots:
            raise SpecFormatError(f"has {len(beta)} slots but n - 1 = {slots}", f"{here}.beta")
        beta = tuple(beta) + (0,) * (slots - len(beta))
        if j + sum(beta) > m:
            raise SpecFormatError(f"order j + |beta| = {j + sum(beta)} exceeds m = {m}", here)
        val = []
        for key in ("re", "im"):
            v = rec.get(key, 0)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise SpecFormatError("must be a finite number", f"{here}.{key}")
            val.append(float(v))
        if (j, beta) in table:
            raise SpecFormatError(f"duplicate term j={j}, beta={list(beta)}", here)
        table[(j, beta)] = complex(*val)
    if not any(abs(c) > 0 and j + sum(b) == m for (j, b), c in table.items()):
        raise SpecFormatError(f"no nonzero coefficient of top order m = {m}", path)
    return tuple(sorted(table.items()))


@dataclass(frozen=True)
class ZeroOpSpec:
    """Boundary coefficients of P = sum a_{j,beta} (x D_x)^j (x D_y)^beta.

    ``coeffs`` holds the coefficients at the base boundary point; each entry
    of ``y_samples`` is a further coefficient table at another point.  Sample
    index 0 is ``coeffs`` itself and index k >= 1 is ``y_samples[k - 1]``.
    """

    n: int
    m: int
    coeffs: tuple[tuple[Term, complex], ...]
    y_samples: tuple[tuple[tuple[Term, complex], ...], ...] = ()

    @classmethod
    def from_dict(cls, data) -> "ZeroOpSpec":
        if not isinstance(data, dict):
            raise SpecFormatError("operator spec must be a JSON object")
        for key in ("n", "m", "coeffs"):
            if key not in data:
                raise SpecFormatError(f"missing field '{key}'")
        n, m = data["n"], data["m"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SpecFormatError("must be an integer >= 1", "n")
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise SpecFormatError("must be an integer >= 1", "m")
        coeffs = _coeff_table(data["coeffs"], n, m, "coeffs")
        samples = data.get("y_samples", [])
        if not isinstance(samples, list):
            raise SpecFormatError("must be a list of coefficient lists", "y_samples")
        ys = tuple(_coeff_table(s, n, m, f"y_samples[{i}]") for i, s in enumerate(samples))
        return cls(n, m, coeffs, ys)

    @classmethod
    def from_terms(cls, n: int, m: int, terms: dict, y_samples: Sequence[dict] = ()) -> "ZeroOpSpec":
        """Build from ``{(j, beta): value}`` maps."""

        def recs(t):
            return [{"j": j, "beta": list(b), "re": complex(v).real, "im": complex(v).imag} for (j, b), v in t.items()]

        return cls.from_dict({"n": n, "m": m, "coeffs": recs(terms), "y_samples": [recs(s) for s in y_samples]})

    @classmethod
    def load(cls, path) -> "ZeroOpSpec":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SpecFormatError(f"invalid JSON: {exc}") from exc
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        def recs(table):
            return [{"j": j, "beta": list(b), "re": c.real, "im": c.imag} for (j, b), c in table]

        out = {"n": self.n, "m": self.m, "coeffs": recs(self.coeffs)}
        if self.y_samples:
            out["y_samples"] = [recs(s) for s in self.y_samples]
        return out

    @property
    def num_samples(self) -> int:
        return 1 + len(self.y_samples)

    def sample(self, y_index: int = 0) -> dict[Term, complex]:
        if not 0 <= y_index < self.num_samples:
            raise ValidationError(f"y_index {y_index} out of range 0..{self.num_samples - 1}")
        table = self.coeffs if y_index == 0 else self.y_samples[y_index - 1]
        return dict(table)


def hyperbolic_operator(n: int, zeta) -> ZeroOpSpec:
    """Spectral family of the hyperbolic Laplacian, Delta - lambda with lambda = zeta (n - 1 - zeta)."""
    lam = complex(zeta) * (n - 1 - complex(zeta))
    slots = n - 1
    terms = {(2, (0,) * slots): 1.0, (1, (0,) * slots): 1j * (n - 1), (0, (0,) * slots): -lam}
    for s in range(slots):
        beta = tuple(2 if i == s else 0 for i in range(slots))
        terms[(0, beta)] = 1.0
    return ZeroOpSpec.from_terms(n, 2, terms)


# ------------------------------------------------------------------ indicial polynomial


@dataclass(frozen=True)
class IndicialPoly:
    """I(sigma) = sum_j coeffs[j] sigma^j.

    Coefficients are complex numbers, or sympy numbers when the polynomial
    is exact (used by the exact indicial solver and exact spectra).
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if not c or c[-1] == 0:
            raise DegenerateLeading("indicial polynomial is identically zero")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, sp.Basic) for c in self.coeffs)

    def numeric(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __call__(self, sigma):
        return np.polynomial.polynomial.polyval(sigma, self.numeric())

    def in_exponent(self, z):
        """J(z) = I(-i z), the polynomial in the exponent variable."""
        return self(-1j * np.asarray(z))

    def sympy_exponent_poly(self, x: sp.Symbol) -> sp.Expr:
        coeffs = [sp.nsimplify(c) if not isinstance(c, sp.Basic) else c for c in self.coeffs]
        return sp.expand(sum(c * (-sp.I * x) ** j for j, c in enumerate(coeffs)))

    @classmethod
    def from_exponents(cls, roots: Iterable, exact: bool = True) -> "IndicialPoly":
        """Polynomial whose exponent form J(z) = I(-i z) is monic with the given roots."""
        x = sp.Symbol("x")
        rts = [sp.nsimplify(_to_sympy(r)) if exact else complex(r) for r in roots]
        J = sp.Poly(sp.prod([x - r for r in rts]) if rts else sp.Integer(1), x)
        jc = list(reversed(J.all_coeffs()))
        # I(sigma) = J(i sigma)
        cs = [sp.expand(c * sp.I**j) for j, c in enumerate(jc)]
        if not exact:
            cs = [complex(c) for c in cs]
        return cls(tuple(cs))


def _to_sympy(r):
    if isinstance(r, ComplexExponent):
        return sp.Rational(r.re) + sp.I * sp.Rational(r.im) if r.exact else sp.Float(r.re) + sp.I * sp.Float(r.im)
    if isinstance(r, Fraction):
        return sp.Rational(r.numerator, r.denominator)
    if isinstance(r, complex):
        return sp.nsimplify(r.real) + sp.I * sp.nsimplify(r.imag)
    return sp.sympify(r)


def indicial_family(op: ZeroOpSpec, y_index: int = 0, threshold: float = LEADING_THRESHOLD) -> IndicialPoly:
    """Indicial polynomial at sample ``y_index`` from the beta = 0 coefficients."""
    table = op.sample(y_index)
    zero = (0,) * (op.n - 1)
    cs = [table.get((j, zero), 0j) for j in range(op.m + 1)]
    scale = max(abs(c) for c in table.values())
    if abs(cs[op.m]) <= threshold * max(scale, 1.0):
        raise DegenerateLeading(
            f"leading coefficient a_(m,0) = {cs[op.m]} is below {threshold:g} relative to the coefficients"
        )
    return IndicialPoly(tuple(cs))


# ------------------------------------------------------------------ boundary spectrum


@dataclass(frozen=True)
class BoundarySpectrum:
    """Clustered roots (z, multiplicity) of the indicial polynomial."""

    roots: tuple[tuple[ComplexExponent, int], ...]
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    def __post_init__(self):
        rs = tuple((ComplexExponent.of(z), int(m)) for z, m in self.roots)
        for z, m in rs:
            if m < 1:
                raise ValidationError(f"multiplicity of {z} must be positive")
        object.__setattr__(self, "roots", tuple(sorted(rs, key=lambda r: r[0].sort_key())))

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    @property
    def exact(self) -> bool:
        return all(z.exact for z, _ in self.roots)

    def points(self) -> list[IndexPoint]:
        return [IndexPoint(z, k) for z, m in self.roots for k in range(m)]

    def exponents(self) -> list[complex]:
        return [complex(z) for z, m in self.roots for _ in range(m)]

    @classmethod
    def from_points(cls, points, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> "BoundarySpectrum":
        """From pairs (z, k); multiplicity is one more than the largest k at z."""
        mult: dict[ComplexExponent, int] = {}
        for p in points:
            ip = as_point(p)
            mult[ip.z] = max(mult.get(ip.z, 0), ip.k + 1)
        return cls(tuple(mult.items()), cluster_tol)

    @classmethod
    def from_exponents(cls, exps, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> "BoundarySpectrum":
        """From a list of roots repeated according to multiplicity."""
        mult: dict[ComplexExponent, int] = {}
        for z in exps:
            z = ComplexExponent.of(z)
            mult[z] = mult.get(z, 0) + 1
        return cls(tuple(mult.items()), cluster_tol)

    def to_dict(self) -> dict:
        return {
            "roots": [{"re": encode_real(z.re), "im": encode_real(z.im), "mult": m} for z, m in self.roots],
            "cluster_tol": self.cluster_tol,
        }


def _cluster(values: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for v in sorted(values, key=lambda c: (c.real, c.imag)):
        placed = False
        for cl in clusters:
            d = abs(v - np.mean(cl))
            if d <= tol:
                cl.append(v)
                placed = True
                break
        if not placed:
            clusters.append([v])
    means = [(complex(np.mean(cl)), len(cl)) for cl in clusters]
    for i in range(len(means)):
        for j in range(i + 1, len(means)):
            d = abs(means[i][0] - means[j][0])
            if tol < d <= 10 * tol:
                raise ClusterAmbiguity(
                    f"roots {means[i][0]:.12g} and {means[j][0]:.12g} are {d:.3g} apart, "
                    f"inside the ambiguity band ({tol:g}, {10 * tol:g}]"
                )
    return means


def _exact_roots(poly: IndicialPoly) -> list[tuple[ComplexExponent, int]]:
    x = sp.Symbol("x")
    J = sp.Poly(poly.sympy_exponent_poly(x), x)
    roots = sp.roots(J, x)
    if sum(roots.values()) != J.degree():
        raise ValidationError("exact mode: the indicial polynomial does not split over the rationals")
    out = []
    for r, m in roots.items():
        re, im = sp.re(r), sp.im(r)
        if not (re.is_Rational and im.is_Rational):
            raise ValidationError(f"exact mode: root {r} is not a Gaussian rational")
        out.append((ComplexExponent(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))), int(m)))
    return out


def boundary_spectrum(
    poly: IndicialPoly, cluster_tol: float = DEFAULT_CLUSTER_TOL, exact: bool = False
) -> BoundarySpectrum:
    """Roots z = i sigma of I, clustered into multiplicities.

    With ``exact`` the polynomial is rationalized and factored symbolically;
    the roots must then be Gaussian rationals.
    """
    if exact:
        if not poly.exact:
            poly = IndicialPoly(tuple(_snap(c) for c in poly.coeffs))
        return BoundarySpectrum(tuple(_exact_roots(poly)), 0.0)
    c = poly.numeric()
    sigma = np.roots(c[::-1]) if poly.degree > 0 else np.array([], dtype=complex)
    z = 1j * sigma
    return BoundarySpectrum(tuple((ComplexExponent(v.real, v.imag), m) for v, m in _cluster(z, cluster_tol)), cluster_tol)


def _snap(c) -> sp.Expr:
    c = complex(c)
    return sp.nsimplify(c.real, rational=True, tolerance=1e-12) + sp.I * sp.nsimplify(c.imag, rational=True, tolerance=1e-12)


def root_residuals(poly: IndicialPoly, spec: BoundarySpectrum) -> list[float]:
    """|I(sigma_r)| / (1 + |sigma_r|)^m for each clustered root."""
    m = poly.degree
    out = []
    for z, _ in spec.roots:
        s = -1j * complex(z)
        out.append(abs(poly(s)) / (1 + abs(s)) ** m)
    return out


# ------------------------------------------------------------------ half spectra and adjoints


def half_spectra(
    spec: BoundarySpectrum, alpha, tol: float = DEFAULT_TOL
) -> tuple[TruncatedIndexSet, TruncatedIndexSet]:
    """E_+ from roots with Re z > alpha, E_- from {-z : Re z < alpha}."""
    for z, _ in spec.roots:
        if abs(z.re - alpha) <= tol:
            raise WeightOnSpectrum(
                f"weight alpha = {float(alpha):.12g} lies on the boundary spectrum: "
                f"Re z = {float(z.re):.12g} (tolerance {tol:g})"
            )
    set_tol = 0.0 if spec.exact else tol
    plus = [(p.z, p.k) for p in spec.points() if p.z.re > alpha]
    minus = [(-p.z, p.k) for p in spec.points() if p.z.re < alpha]
    return from_half_spectrum(plus, tol=set_tol), from_half_spectrum(minus, tol=set_tol)


def adjoint_spectrum(spec: BoundarySpectrum, n: int) -> BoundarySpectrum:
    """Spectrum of the adjoint: z is a root iff (n - 1) - conj(z) is a root of P."""
    return BoundarySpectrum(tuple(((n - 1) - z.conjugate(), m) for z, m in spec.roots), spec.cluster_tol)


def adjoint_indicial(poly: IndicialPoly, n: int) -> IndicialPoly:
    """Indicial polynomial of the formal adjoint: conj(I)(sigma + i(n - 1))."""
    c = poly.numeric().conj()
    shifted = np.polynomial.polynomial.Polynomial(c)(np.polynomial.polynomial.Polynomial([1j * (n - 1), 1]))
    coef = shifted.coef
    coef = np.concatenate([coef, np.zeros(poly.degree + 1 - len(coef))])
    return IndicialPoly(tuple(complex(v) for v in coef))


# ------------------------------------------------------------------ ellipticity and y-variation


@dataclass(frozen=True)
class EllipticityReport:
    elliptic: bool
    min_abs_symbol: float
    witness: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.elliptic


def principal_symbol(op: ZeroOpSpec, y_index: int = 0):
    table = op.sample(y_index)
    top = [(j, np.array(b), c) for (j, b), c in table.items() if j + sum(b) == op.m]

    def symbol(v: np.ndarray) -> complex:
        xi, eta = v[0], v[1:]
        return sum(c * xi**j * np.prod(eta**b) for j, b, c in top)

    return symbol


def _sphere_samples(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        th = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def ellipticity_check(
    op: ZeroOpSpec,
    grid_density: int = DEFAULT_SPHERE_SAMPLES,
    eps: float = DEFAULT_ELL_EPS,
    y_index: int = 0,
    seed: int = 0,
) -> EllipticityReport:
    """Sampled screening of the principal symbol on the unit sphere.

    This is a necessary-condition test: a zero between samples can be
    missed, although the best samples are polished by a local search.
    """
    symbol = principal_symbol(op, y_index)
    pts = _sphere_samples(op.n, grid_density, np.random.default_rng(seed))
    vals = np.array([abs(symbol(p)) for p in pts])
    best = pts[int(np.argmin(vals))]
    best_val = float(vals.min())
    if op.n > 1:

        def f(v):
            nv = np.linalg.norm(v)
            return abs(symbol(v / nv)) if nv > 1e-12 else np.inf

        for idx in np.argsort(vals)[:5]:
            res = minimize(f, pts[idx], method="Nelder-Mead", options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 4000})
            if res.fun < best_val:
                best_val = float(res.fun)
                best = res.x / np.linalg.norm(res.x)
    return EllipticityReport(best_val >= eps, best_val, tuple(float(v) for v in best))


@dataclass(frozen=True)
class SpectrumVariation:
    spectra: tuple[BoundarySpectrum, ...]
    max_distance: float
    constant: bool
    tol: float


def _matching_distance(a: list[complex], b: list[complex]) -> float:
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    cost = np.abs(np.subtract.outer(np.array(a), np.array(b)))
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def spectrum_variation(
    op: ZeroOpSpec, cluster_tol: float = DEFAULT_CLUSTER_TOL, tol: float = DEFAULT_CLUSTER_TOL
) -> SpectrumVariation:
    """Spectra at every boundary sample and the largest matching distance between any two."""
    spectra = tuple(boundary_spectrum(indicial_family(op, i), cluster_tol) for i in range(op.num_samples))
    exps = [s.exponents() for s in spectra]
    dist = 0.0
    for i in range(len(exps)):
        for j in range(i + 1, len(exps)):
            dist = max(dist, _matching_distance(exps[i], exps[j]))
    return SpectrumVariation(spectra, dist, dist <= tol, tol)


def require_constant_spectrum(op: ZeroOpSpec, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> BoundarySpectrum:
    var = spectrum_variation(op, cluster_tol)
    if not var.constant:
        raise NonConstantSpectrum(
            f"boundary spectrum varies across samples (max root distance {var.max_distance:.3g} > {var.tol:g}); "
            "use the bounds planner (plan-bounds) instead"
        )
    return var.spectra[0]
