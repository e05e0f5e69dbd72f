from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krden import density_poly as dp
from krden.density_poly import DensityPolynomial, DerivedKind
from krden.errors import InvalidInput
from krden.lattice_algebra import diagonal, dual, h0p, heps, hyperbolic, is_anisotropic, orthosum, rescale
from krden.rep_counting import density

P = 3
fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@given(st.lists(fractions, min_size=1, max_size=7))
def test_interpolation_recovers_polynomials(coeffs):
    poly = DensityPolynomial(tuple(coeffs))
    xs = [Fraction(1, P**k) for k in range(len(coeffs))]
    assert dp.interpolate(xs, [poly(x) for x in xs]).same_as(poly)


@given(st.lists(fractions, max_size=4), st.lists(fractions, max_size=4), fractions)
def test_polynomial_arithmetic_matches_evaluation(a, b, x):
    f, g = DensityPolynomial(tuple(a)), DensityPolynomial(tuple(b))
    assert (f * g)(x) == f(x) * g(x)
    assert (f + g)(x) == f(x) + g(x)
    assert (1 - f)(x) == 1 - f(x)
    assert f.derivative().degree <= max(f.degree - 1, -1)


def test_polynomial_json():
    poly = DensityPolynomial((Fraction(1), Fraction(-1), Fraction(0)))
    assert poly.to_json() == {"coeffs": ["1", "-1"], "vanishes_at_1": True}
    assert poly.degree == 1


@pytest.mark.parametrize(
    "target,source",
    [
        (h0p(P), diagonal(P, [1, 2, 3])),
        (h0p(P), diagonal(P, [1, 3, 6])),
        pytest.param(h0p(P), diagonal(P, [3, 3, -3]), marks=pytest.mark.slow),
        (heps(P, 4, 1), diagonal(P, [3, -3, 3])),
        (orthosum(diagonal(P, [1]), hyperbolic(P, 1)), diagonal(P, [2, 9])),
    ],
)
def test_router_matches_brute_force(target, source):
    assert dp.den(target, source) == density(target, source).normalized


def test_scaled_and_non_integral_inputs():
    assert dp.den(h0p(P), diagonal(P, [Fraction(1, 3), 1, 1])) == 0
    L = orthosum(diagonal(P, [Fraction(1, 3)]), heps(P, 2, -1))
    assert dp.den(dual(h0p(P)), L) == Fraction(P**-6) * dp.den(rescale(dual(h0p(P)), P), rescale(L, P))


def test_den_at_moves_along_the_polynomial():
    M, L = h0p(P), diagonal(P, [1, 1, 3])
    poly = dp.den_poly(M, L)
    for k in range(3):
        assert poly(Fraction(1, P**k)) == dp.den_at(M, L, k)
    assert poly.vanishes_at_1()
    with pytest.raises(InvalidInput):
        dp.den_at(M, L, -1)


def test_non_integral_source_gives_zero_polynomial():
    poly = dp.den_poly(h0p(P), diagonal(P, [1, 1, Fraction(1, 3)]))
    assert poly.coefficients == () and poly.provenance == "closed-form"


def test_normalizers_are_positive_densities():
    expected = {
        DerivedKind.H0P: Fraction(8, 3),
        DerivedKind.H0P_DUAL: Fraction(8, 2187),
        DerivedKind.AUG_SPLIT: Fraction(2, 3),
        DerivedKind.AUG_SCALED: Fraction(2),
    }
    for kind, value in expected.items():
        assert dp.normalizer(kind, P) == value


def test_dden_rank_checks():
    with pytest.raises(InvalidInput):
        dp.dden(DerivedKind.H0P, diagonal(P, [1, 1]))
    with pytest.raises(InvalidInput):
        dp.dden(DerivedKind.AUG_SPLIT, diagonal(P, [1, 1, 3]), 9)
    with pytest.raises(InvalidInput):
        dp.derived_target(DerivedKind.AUG_SPLIT, P, 0)


def _anisotropic_completion(a, b, n):
    for u1 in (1, 2):
        for u2 in (1, 2):
            for u3 in (1, 2):
                entries = [u1 * P**a, u2 * P**b, u3 * P**n]
                if is_anisotropic(diagonal(P, entries)):
                    return entries
    raise AssertionError("no anisotropic completion")


@pytest.mark.parametrize("a,b,n", [(0, 0, 3), (0, 1, 2), (1, 1, 2), (0, 2, 3), (1, 2, 2), (0, 3, 3), (2, 2, 3)])
def test_closed_rank2_forms_match_interpolation(a, b, n):
    entries = _anisotropic_completion(a, b, n)
    flat, s = diagonal(P, entries[:2]), entries[2]
    assert dp.dden(DerivedKind.AUG_SCALED, flat, s) == dp.dden_rank2_closed("augscaled", a, b, P)
    assert dp.dden(DerivedKind.AUG_SPLIT, flat, s) == dp.dden_rank2_closed("rescaled", a + 1, b + 1, P)


def test_closed_forms_are_integers_on_odd_parity():
    for a in range(4):
        for b in range(a, 5):
            for kind in ("augscaled", "rescaled"):
                assert dp.dden_rank2_closed(kind, a, b, P).denominator == 1


def test_closed_form_worked_values():
    assert dp.dden_rank2_closed("augscaled", 0, 0, P) == -1
    assert dp.dden_rank2_closed("rescaled", 0, 0, P) == 0
    with pytest.raises(InvalidInput):
        dp.dden_rank2_closed("augscaled", 2, 1, P)
    with pytest.raises(InvalidInput):
        dp.dden_rank2_closed("other", 0, 0, P)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([(1, 1, 3), (1, 3, 3), (1, 1, 27), (1, 3, 9), (3, 3, 9), (1, 9, 9)]), st.integers(0, 1))
def test_anisotropic_polynomials_vanish_at_one(entries, twist):
    entries = list(entries)
    entries[0] *= 2 if twist else 1
    L = diagonal(P, entries)
    if not is_anisotropic(L):
        return
    assert dp.den_poly(h0p(P), L).vanishes_at_1()
    assert dp.den_poly(dual(h0p(P)), L).vanishes_at_1()
