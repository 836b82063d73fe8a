from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from conftest import exact_set, keys
from zerocalc.errors import CutoffExceeded, ValidationError
from zerocalc.indexset import (
    EMPTY,
    INF,
    N0,
    ComplexExponent,
    TruncatedIndexSet,
    closure_members,
    extended_union,
    from_half_spectrum,
    generate_flat,
    generate_hat,
    generate_sharp,
    hat_iteration,
    min_re,
    shift,
    shift_int,
    sum_,
    union,
)


def gens(E):
    return [(g.z.re, g.z.im, g.k) for g in E.generators]


def test_hat_of_single_point():
    E = exact_set([(1, 0, 0)])
    H = generate_hat(E, 5)
    assert gens(H) == [(1, 0, 0), (2, 0, 1), (3, 0, 2), (4, 0, 3)]


def test_hat_iteration_count():
    H, j = hat_iteration(exact_set([(1, 0, 0)]), 5)
    assert j == 3  # X_3 already carries (4, 3); X_4 repeats it
    assert keys(H, 5) == bf.hat(bf.members([(1, 0, 0)], 5), 5)


def test_extended_union_of_naturals():
    U = extended_union(N0, N0)
    assert gens(U) == [(0, 0, 1)]


def test_sum_with_empty_is_empty():
    assert not sum_(EMPTY, N0)
    assert not sum_(N0, EMPTY)


def test_extended_union_with_empty_is_identity():
    E = exact_set([(Fraction(1, 2), 0, 1), (2, 1, 0)])
    assert extended_union(E, EMPTY) == E
    assert extended_union(EMPTY, E) == E


def test_generators_are_canonical():
    # (2, 0) is already produced by (1, 0) + 1
    E = exact_set([(1, 0, 0), (2, 0, 0), (1, 0, 1)])
    assert gens(E) == [(1, 0, 1)]


def test_sum_example():
    E = exact_set([(Fraction(3, 2), 0, 0)])
    F = exact_set([(Fraction(1, 2), 0, 1)])
    assert gens(sum_(E, F)) == [(2, 0, 1)]


def test_shift_and_min_re():
    E = exact_set([(Fraction(1, 2), 0, 0), (3, 1, 1)])
    S = shift(E, Fraction(-3, 2))
    assert min_re(S) == -1
    assert gens(shift_int(E, 2)) == [(Fraction(5, 2), 0, 0), (5, 1, 1)]
    assert min_re(EMPTY) == INF


def test_shift_moves_cutoff():
    E = exact_set([(0, 0, 0)], cutoff=4)
    assert shift(E, 1).cutoff == 5


def test_closure_members_respects_cutoff():
    E = exact_set([(0, 0, 0)], cutoff=3)
    assert [(p.z.re, p.k) for p in closure_members(E, 3)] == [(0, 0), (1, 0), (2, 0)]
    with pytest.raises(CutoffExceeded):
        closure_members(E, 4)


def test_union_takes_max_log_power():
    E = exact_set([(0, 0, 2)])
    F = exact_set([(1, 0, 0), (Fraction(1, 3), 0, 0)])
    assert gens(union(E, F)) == [(0, 0, 2), (Fraction(1, 3), 0, 0)]


def test_from_half_spectrum():
    E = from_half_spectrum([(ComplexExponent(Fraction(3, 2)), 0)], tol=0.0)
    assert gens(E) == [(Fraction(3, 2), 0, 0)]


def test_float_coincidence_within_tol():
    E = TruncatedIndexSet.from_points([(0.5, 0.0, 0)], tol=1e-9)
    F = TruncatedIndexSet.from_points([(0.5 + 1e-12, 0.0, 0)], tol=1e-9)
    assert gens(extended_union(E, F))[0][2] == 1


def test_negative_tolerance_rejected():
    with pytest.raises(ValidationError):
        TruncatedIndexSet.from_points([(0, 0, 0)], tol=-1.0)


def test_serialization_round_trip():
    E = exact_set([(Fraction(3, 2), Fraction(-1, 3), 2), (0, 0, 0)], cutoff=7)
    assert TruncatedIndexSet.from_dict(E.to_dict()) == E
    F = TruncatedIndexSet.from_points([(0.25, 1.5, 1)], tol=1e-9)
    assert TruncatedIndexSet.from_dict(F.to_dict()) == F


def test_sharp_contains_flat_and_shifted_hat():
    H = generate_hat(exact_set([(1, 0, 0)]), 6)
    L = generate_flat(H, 6)
    S = generate_sharp(L, H, 6)
    assert keys(L, 6) <= keys(S, 6)
    assert keys(shift_int(H, 1), 6) <= keys(S, 6)


# ---------------------------------------------------------------- properties

_re = st.fractions(min_value=-2, max_value=4, max_denominator=4)
_pt = st.tuples(_re, st.sampled_from([Fraction(0), Fraction(1, 2)]), st.integers(0, 2))
_sets = st.lists(_pt, min_size=0, max_size=4)
C = 6


@settings(max_examples=60, deadline=None)
@given(_sets)
def test_closure_is_sound(points):
    E = exact_set(points)
    got = keys(E, C)
    assert got == bf.members(points, C)
    for re, im, k in got:
        if re + 1 < C:
            assert (re + 1, im, k) in got
        if k:
            assert (re, im, k - 1) in got


@settings(max_examples=60, deadline=None)
@given(_sets, _sets, _sets)
def test_extended_union_associative(a, b, c):
    A, B, Cc = exact_set(a), exact_set(b), exact_set(c)
    assert extended_union(extended_union(A, B), Cc) == extended_union(A, extended_union(B, Cc))


@settings(max_examples=60, deadline=None)
@given(_sets, _sets)
def test_sum_and_extended_union_commute(a, b):
    A, B = exact_set(a), exact_set(b)
    assert sum_(A, B) == sum_(B, A)
    assert extended_union(A, B) == extended_union(B, A)


@settings(max_examples=60, deadline=None)
@given(_sets, _sets, _sets)
def test_monotonicity(a, b, c):
    # A subset of A u B, so ops with C grow
    A, B, Cc = exact_set(a), exact_set(b), exact_set(c)
    AB = union(A, B)
    assert keys(sum_(A, Cc), C) <= keys(sum_(AB, Cc), C)
    assert keys(extended_union(A, Cc), C) <= keys(extended_union(AB, Cc), C)


@settings(max_examples=60, deadline=None)
@given(_sets, _sets)
def test_extended_union_dominates_union(a, b):
    A, B = exact_set(a), exact_set(b)
    assert keys(union(A, B), C) <= keys(extended_union(A, B), C)


@settings(max_examples=40, deadline=None)
@given(_sets)
def test_hat_matches_bruteforce(points):
    E = exact_set(points)
    assert keys(generate_hat(E, C), C) == bf.hat(bf.members(points, C), C)


# ---------------------------------------------------------------- worked examples

F_ = Fraction


@pytest.mark.parametrize(
    "points, C, expected",
    [
        ([(0, 0, 0)], F_(5, 2), [(0, 0), (1, 0), (2, 0)]),
        ([], 100, []),
        ([(F_(3, 2), 0, 0)], F_(18, 5), [(F_(3, 2), 0), (F_(5, 2), 0), (F_(7, 2), 0)]),
    ],
)
def test_closure_member_examples(points, C, expected):
    assert [(p.z.re, p.k) for p in closure_members(exact_set(points), C)] == expected


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ([(1, 0, 0)], [(2, 0, 1)], [(3, 0, 1)]),
        ([], [(2, 0, 1)], []),
        ([(0, 0, 1)], [(0, 0, 1)], [(0, 0, 2)]),
    ],
)
def test_sum_examples(a, b, expected):
    assert gens(sum_(exact_set(a), exact_set(b))) == expected


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ([(0, 0, 0)], [(0, 0, 0)], [(0, 0, 1)]),
        ([(1, 0, 0)], [(2, 0, 0)], [(1, 0, 0), (2, 0, 1)]),
        ([], [(2, 0, 1)], [(2, 0, 1)]),
    ],
)
def test_extended_union_examples(a, b, expected):
    assert gens(extended_union(exact_set(a), exact_set(b))) == expected
    assert keys(extended_union(exact_set(a), exact_set(b)), 8) == bf.ext_union(bf.members(a, 8), bf.members(b, 8), 8)


def test_shift_examples():
    assert gens(shift(N0, 1)) == [(1, 0, 0)]
    assert gens(shift(exact_set([(F_(3, 2), 2, 0)]), 3)) == [(F_(9, 2), 2, 0)]
    assert not shift(EMPTY, 5)


def test_min_re_examples():
    assert min_re(N0) == 0
    assert min_re(exact_set([(F_(3, 2), 0, 0), (F_(1, 2), 3, 0)])) == F_(1, 2)


def test_hat_examples():
    assert not generate_hat(EMPTY, 5)
    assert gens(generate_hat(N0, 4)) == [(0, 0, 0), (1, 0, 1), (2, 0, 2), (3, 0, 3)]


def test_flat_examples():
    assert not generate_flat(EMPTY, 4)
    H = generate_hat(exact_set([(1, 0, 0)]), 4)
    L = generate_flat(H, 4)
    assert keys(L, 4) == bf.flat(keys(H, 4), 4)
    assert (2, 0, 1) in keys(L, 4)
    assert min_re(L) == 1 and gens(L)[0] == (1, 0, 0)
    L0 = generate_flat(generate_hat(N0, 3), 3)
    assert keys(L0, 3) == bf.flat(bf.hat(bf.members([(0, 0, 0)], 3), 3), 3)
    assert gens(L0)[0] == (0, 0, 0)


def test_front_face_family_examples():
    from zerocalc.indexset import generate_ff

    assert generate_ff(EMPTY, EMPTY, 2, 6) == TruncatedIndexSet.from_points([(0, 0, 0)], 6, tol=0.0)
    # hyperbolic n = 2, zeta = 3/2, alpha = 1/2: E_+ = {3/2}, E_- = {1/2}
    Hp = generate_hat(exact_set([(F_(3, 2), 0, 0)]), 10)
    Hm = generate_hat(exact_set([(F_(1, 2), 0, 0)]), 10)
    Lm = generate_flat(Hm, 10)
    ff = generate_ff(Hp, Lm, 2, 10)
    expected = bf.ff(keys(Hp, 10), keys(Lm, 10), 2, 10)
    assert keys(ff, 6) == {p for p in expected if p[0] < 6}
    assert min(p for p in keys(ff, 6) if p[2] > 0)[:2] == (3, 0)
    Hm3 = generate_hat(exact_set([(F_(1, 2), 0, 0)]), 10)
    ff3 = generate_ff(Hp, generate_flat(Hm3, 10), 3, 10)
    assert keys(ff3, 6) == {p for p in bf.ff(keys(Hp, 10), keys(generate_flat(Hm3, 10), 10), 3, 10) if p[0] < 6}


@pytest.mark.parametrize(
    "points, expected",
    [
        ([(F_(3, 2), 0)], [(F_(3, 2), 0, 0)]),
        ([(F_(1, 2), 0), (F_(3, 2), 0)], [(F_(1, 2), 0, 0)]),  # 3/2 = 1/2 + 1 is generated
        ([(F_(1, 2), 0), (F_(4, 3), 0)], [(F_(1, 2), 0, 0), (F_(4, 3), 0, 0)]),
        ([(F_(1, 2), 0), (F_(5, 2), 1)], [(F_(1, 2), 0, 0), (F_(5, 2), 0, 1)]),
        ([(F_(1, 2), 1), (F_(5, 2), 0)], [(F_(1, 2), 0, 1)]),
    ],
)
def test_half_spectrum_domination(points, expected):
    E = from_half_spectrum([(ComplexExponent(z), k) for z, k in points], tol=0.0)
    assert gens(E) == expected
