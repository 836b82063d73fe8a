import json
from fractions import Fraction

import numpy as np
import pytest

from zerocalc.errors import (
    ClusterAmbiguity,
    DegenerateLeading,
    NonConstantSpectrum,
    SpecFormatError,
    WeightOnSpectrum,
)
from zerocalc.indexset import ComplexExponent, shift, shift_int
from zerocalc.spectrum import (
    BoundarySpectrum,
    IndicialPoly,
    ZeroOpSpec,
    adjoint_indicial,
    adjoint_spectrum,
    boundary_spectrum,
    ellipticity_check,
    half_spectra,
    hyperbolic_operator,
    indicial_family,
    require_constant_spectrum,
    root_residuals,
    spectrum_variation,
)


def roots_of(spec):
    return sorted((complex(z).real, complex(z).imag, m) for z, m in spec.roots)


def test_hyperbolic_indicial_poly():
    poly = indicial_family(hyperbolic_operator(2, 1.5))
    assert np.allclose(poly.numeric(), [0.75, 1j, 1])


def test_pure_tangential_top_order_gives_monomial():
    op = ZeroOpSpec.from_terms(3, 2, {(2, (0, 0)): 1, (0, (1, 1)): 2.0, (0, (2, 0)): 1})
    assert np.allclose(indicial_family(op).numeric(), [0, 0, 1])


def test_degenerate_leading():
    op = ZeroOpSpec.from_terms(2, 2, {(0, (2,)): 1, (1, (0,)): 1})
    with pytest.raises(DegenerateLeading):
        indicial_family(op)


def test_spectrum_of_hyperbolic_quadratic():
    spec = boundary_spectrum(IndicialPoly((0.75, 1j, 1)))
    got = roots_of(spec)
    assert [m for *_, m in got] == [1, 1]
    assert abs(got[0][0] + 0.5) < 1e-12 and abs(got[1][0] - 1.5) < 1e-12
    for z, _ in spec.roots:
        w = complex(z)
        assert abs(-(w**2) + w + 0.75) < 1e-12
    assert max(root_residuals(IndicialPoly((0.75, 1j, 1)), spec)) < 1e-14


def test_double_root_multiplicity():
    spec = boundary_spectrum(indicial_family(hyperbolic_operator(2, 0.5)))
    assert len(spec.roots) == 1 and spec.roots[0][1] == 2
    assert abs(complex(spec.roots[0][0]) - 0.5) < 1e-7
    assert [(p.k) for p in spec.points()] == [0, 1]


def test_linear_poly_root_zero():
    spec = boundary_spectrum(IndicialPoly((0, 1)))
    assert roots_of(spec) == [(0.0, 0.0, 1)] or abs(roots_of(spec)[0][0]) < 1e-15


def test_exact_spectrum():
    spec = boundary_spectrum(indicial_family(hyperbolic_operator(2, 1.5)), exact=True)
    assert spec.exact
    assert sorted(z.re for z, _ in spec.roots) == [Fraction(-1, 2), Fraction(3, 2)]


def test_cluster_ambiguity():
    # roots 1 and 1 + 3e-7 with cluster_tol 1e-7 fall in the ambiguity band
    poly = IndicialPoly.from_exponents([1.0, 1.0 + 3e-7], exact=False)
    with pytest.raises(ClusterAmbiguity):
        boundary_spectrum(poly, cluster_tol=1e-7)


def test_half_spectra_examples():
    spec = BoundarySpectrum.from_exponents([Fraction(3, 2), Fraction(-1, 2)], cluster_tol=0.0)
    Ep, Em = half_spectra(spec, Fraction(1, 2))
    assert [(g.z.re, g.k) for g in Ep.generators] == [(Fraction(3, 2), 0)]
    assert [(g.z.re, g.k) for g in Em.generators] == [(Fraction(1, 2), 0)]
    with pytest.raises(WeightOnSpectrum):
        half_spectra(spec, Fraction(3, 2))
    double = BoundarySpectrum.from_exponents([Fraction(1, 2), Fraction(1, 2)], cluster_tol=0.0)
    Ep, Em = half_spectra(double, 0)
    assert [(g.z.re, g.k) for g in Ep.generators] == [(Fraction(1, 2), 1)]
    assert not Em


def test_adjoint_spectrum_round_trip():
    spec = BoundarySpectrum.from_exponents([ComplexExponent(1.5, 0.25), ComplexExponent(-0.5, 0.0)])
    back = adjoint_spectrum(adjoint_spectrum(spec, 3), 3)
    assert roots_of(back) == roots_of(spec)


def test_adjoint_indicial_roots_reflect():
    n = 3
    poly = IndicialPoly.from_exponents([complex(1.5, 0.25), complex(-0.5, 0)], exact=False)
    lhs = roots_of(boundary_spectrum(adjoint_indicial(poly, n)))
    rhs = roots_of(adjoint_spectrum(boundary_spectrum(poly), n))
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_reflection_duality_of_half_spectra():
    n, alpha = 2, Fraction(1, 2)
    spec = BoundarySpectrum.from_exponents([Fraction(3, 2), Fraction(-1, 2)], cluster_tol=0.0)
    adj = adjoint_spectrum(spec, n)
    Ep_adj, Em_adj = half_spectra(adj, (n - 1) - alpha)
    Ep, Em = half_spectra(spec, alpha)
    # Re z' > n-1-alpha  <=>  Re z < alpha; z' = (n-1) - conj(z) = conj(-z) + (n-1)
    conj = lambda E: sorted((g.z.re, -g.z.im, g.k) for g in E.generators)
    assert sorted((g.z.re, g.z.im, g.k) for g in Ep_adj.generators) == conj(shift_int(Em, n - 1))
    assert sorted((g.z.re, g.z.im, g.k) for g in Em_adj.generators) == conj(shift(Ep, -(n - 1)))


def test_ellipticity_examples():
    assert ellipticity_check(hyperbolic_operator(3, 1.8)).elliptic
    wave = ZeroOpSpec.from_terms(2, 2, {(2, (0,)): 1, (0, (2,)): -1})
    rep = ellipticity_check(wave)
    assert not rep.elliptic
    xi, eta = rep.witness
    assert abs(abs(xi) - abs(eta)) < 1e-6
    cr = ZeroOpSpec.from_terms(2, 1, {(1, (0,)): 1, (0, (1,)): 1j})
    assert ellipticity_check(cr).elliptic


def _lam_sample(lam):
    return {(2, (0,)): 1, (1, (0,)): 1j, (0, (0,)): -lam, (0, (2,)): 1}


def test_spectrum_variation():
    same = ZeroOpSpec.from_terms(2, 2, _lam_sample(-0.75), [_lam_sample(-0.75)])
    v = spectrum_variation(same)
    assert v.constant and v.max_distance == 0
    assert spectrum_variation(hyperbolic_operator(2, 1.5)).constant
    moved = ZeroOpSpec.from_terms(2, 2, _lam_sample(-0.75), [_lam_sample(-0.76)])
    v = spectrum_variation(moved)
    # roots of z^2 - z - 0.76 against 1.5, -0.5
    r = (1 + np.sqrt(1 + 4 * 0.76)) / 2
    assert not v.constant and v.max_distance == pytest.approx(r - 1.5, rel=1e-9)
    with pytest.raises(NonConstantSpectrum, match="plan-bounds"):
        require_constant_spectrum(moved)


def test_spec_format_errors_name_the_field():
    good = hyperbolic_operator(2, 1.5).to_dict()
    bad = json.loads(json.dumps(good))
    bad["coeffs"][2]["re"] = "x"
    with pytest.raises(SpecFormatError) as info:
        ZeroOpSpec.from_dict(bad)
    assert info.value.path == "coeffs[2].re"
    bad = json.loads(json.dumps(good))
    bad["coeffs"][0]["beta"] = [0, 0, 0]
    with pytest.raises(SpecFormatError):
        ZeroOpSpec.from_dict(bad)
    with pytest.raises(SpecFormatError):
        ZeroOpSpec.from_dict({"n": 2, "m": 2})


def test_spec_round_trip():
    op = hyperbolic_operator(3, 1.8)
    assert ZeroOpSpec.from_dict(op.to_dict()) == op
