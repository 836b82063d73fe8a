from fractions import Fraction

import pytest
import sympy as sp

from zerocalc.errors import ValidationError
from zerocalc.normal_op import apply_indicial, indicial_solve
from zerocalc.spectrum import IndicialPoly

t = sp.Symbol("t", positive=True)
L01 = IndicialPoly.from_exponents([0, 1])  # (t d/dt)(t d/dt - 1)


def expr(u):
    return sp.simplify(u.as_expr(t))


def test_non_resonant_power():
    assert sp.simplify(expr(indicial_solve(L01, (2, 0))) - t**2 / 2) == 0


def test_resonant_power_gains_log():
    assert sp.simplify(expr(indicial_solve(L01, (1, 0))) - t * sp.log(t)) == 0


def test_half_power():
    assert sp.simplify(expr(indicial_solve(L01, (Fraction(1, 2), 0))) + 4 * sp.sqrt(t)) == 0


def test_log_rhs_double_root():
    poly = IndicialPoly.from_exponents([1, 1])
    u = indicial_solve(poly, (1, 1))
    assert u.max_log_power() == 3
    v = expr(u)
    lhs = sp.simplify(t * sp.diff(t * sp.diff(v, t), t) - 2 * t * sp.diff(v, t) + v)
    assert sp.simplify(lhs - t * sp.log(t)) == 0


def test_apply_indicial_inverts_solve():
    poly = IndicialPoly.from_exponents([Fraction(-1, 2), 2, 2])
    for rhs in [(0, 2), (2, 1), (Fraction(-1, 2), 0), (Fraction(3, 7), 2)]:
        back = apply_indicial(poly, indicial_solve(poly, rhs))
        assert [(w, q, c) for w, q, c in back.terms] == [(sp.sympify(rhs[0]), rhs[1], 1)]


def test_rejects_bad_log_power():
    with pytest.raises(ValidationError):
        indicial_solve(L01, (1, -1))
