"""Exact inversion of the indicial operator on terms t^w (log t)^p.

With s = log t the indicial operator is J(d/ds), J(x) = I(-i x).  Writing
u = e^{w s} v turns J(d/ds) u = e^{w s} s^p into J(w + D) v = s^p.  If w is
a root of J of multiplicity mu then J(w + D) = D^mu K(D) with K(0) != 0;
K(D) is inverted as a power series (it acts on a polynomial) and D^mu by
repeated integration with zero constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from ..errors import ValidationError
from ..indexset import ComplexExponent
from ..spectrum import IndicialPoly

NUMERIC_ZERO = 1e-10


def _sym(w):
    if isinstance(w, ComplexExponent):
        if w.exact:
            return sp.Rational(w.re.numerator, w.re.denominator) + sp.I * sp.Rational(w.im.numerator, w.im.denominator)
        return sp.Float(w.re) + sp.I * sp.Float(w.im)
    if isinstance(w, Fraction):
        return sp.Rational(w.numerator, w.denominator)
    if isinstance(w, complex):
        return sp.Float(w.real) + sp.I * sp.Float(w.imag)
    return sp.sympify(w)


@dataclass(frozen=True)
class Expansion:
    """Finite sum of c t^w (log t)^q, stored as (w, q, c) with sympy numbers."""

    terms: tuple

    def as_expr(self, t: sp.Symbol) -> sp.Expr:
        return sp.Add(*[c * t**w * sp.log(t) ** q for w, q, c in self.terms])

    def max_log_power(self) -> int:
        return max((q for _, q, _ in self.terms), default=-1)

    def __str__(self) -> str:
        return " + ".join(f"({c})*t^({w})*log(t)^{q}" for w, q, c in self.terms) or "0"


def _exponent_poly(poly: IndicialPoly) -> tuple[sp.Poly, sp.Symbol, bool]:
    x = sp.Symbol("x")
    exact = poly.exact
    cs = poly.coeffs if exact else [sp.Float(complex(c).real) + sp.I * sp.Float(complex(c).imag) for c in poly.coeffs]
    J = sp.Poly(sp.expand(sum(c * (-sp.I * x) ** j for j, c in enumerate(cs))), x)
    return J, x, exact


def _taylor_at(J: sp.Poly, x: sp.Symbol, w) -> list:
    """J^(r)(w)/r! for r = 0..deg."""
    out, P = [], J
    fact = 1
    for r in range(J.degree() + 1):
        out.append(sp.expand(P.eval(w) / fact))
        P = P.diff(x)
        fact *= r + 1
    return out


def _is_zero(c, exact: bool, scale) -> bool:
    if exact:
        return sp.simplify(c) == 0
    return abs(complex(c)) <= NUMERIC_ZERO * scale


def indicial_solve(poly: IndicialPoly, rhs, alpha=None) -> Expansion:
    """Solution of I(t D_t) u = t^w (log t)^p as a finite expansion.

    ``rhs`` is a pair (w, p).  Off the indicial roots the result has the
    same exponent and log degree p; at a root of multiplicity mu the log
    degree rises to p + mu.  The particular solution does not depend on the
    weight, so ``alpha`` is accepted only for interface symmetry.
    """
    w, p = rhs
    if int(p) != p or p < 0:
        raise ValidationError(f"log power must be a nonnegative integer, got {p}")
    p = int(p)
    w = _sym(w)
    J, x, exact = _exponent_poly(poly)
    exact = exact and w.is_number and all(part.is_Rational for part in (sp.re(w), sp.im(w)))
    T = _taylor_at(J, x, w)
    scale = max(abs(complex(c)) for c in T) or 1.0
    mu = next(r for r, c in enumerate(T) if not _is_zero(c, exact, scale))
    K = T[mu:]
    b = [1 / K[0]]
    for k in range(1, p + 1):
        acc = sum(K[i] * b[k - i] for i in range(1, min(k, len(K) - 1) + 1))
        b.append(sp.expand(-acc / K[0]))
    # g = sum_k b_k D^k s^p, then integrate mu times
    coeffs: dict[int, sp.Expr] = {}
    for k in range(p + 1):
        deg = p - k
        c = b[k] * sp.factorial(p) / sp.factorial(deg)
        q = deg + mu
        coeffs[q] = coeffs.get(q, 0) + c * sp.factorial(deg) / sp.factorial(q)
    terms = tuple((w, q, sp.radsimp(sp.expand(c)) if exact else sp.expand(c)) for q, c in sorted(coeffs.items()))
    return Expansion(tuple(t for t in terms if t[2] != 0))


def apply_indicial(poly: IndicialPoly, u: Expansion) -> Expansion:
    """I(t D_t) applied termwise to an expansion, collected by (w, q)."""
    J, x, exact = _exponent_poly(poly)
    acc: dict[tuple, sp.Expr] = {}
    for w, q, c in u.terms:
        T = _taylor_at(J, x, w)
        # J(w + D) s^q = sum_r T_r q!/(q-r)! s^(q-r)
        for r in range(min(q, len(T) - 1) + 1):
            key = (w, q - r)
            acc[key] = acc.get(key, 0) + T[r] * c * sp.factorial(q) / sp.factorial(q - r)
    terms = tuple((w, q, sp.expand(c)) for (w, q), c in sorted(acc.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])))
    return Expansion(tuple(t for t in terms if sp.simplify(t[2]) != 0))
