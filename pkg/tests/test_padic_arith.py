from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from krden.errors import InvalidInput
from krden.padic_arith import (
    INFINITY,
    chi,
    hilbert,
    legendre,
    rat,
    rat_str,
    smallest_nonresidue,
    to_residue,
    unit_part,
    valuation,
)

nonzero = st.integers(-500, 500).filter(bool)


def _primes_up_to(n):
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, q))]


def test_rat_parses_strings_and_rejects_garbage():
    assert rat("3/9") == Fraction(1, 3)
    assert rat(-4) == -4
    with pytest.raises(InvalidInput):
        rat("x/2")
    with pytest.raises(InvalidInput):
        rat(1.5)


def test_rat_str_roundtrip():
    for r in (Fraction(0), Fraction(-7, 3), Fraction(12)):
        assert rat(rat_str(r)) == r
    assert rat_str(Fraction(12)) == "12"


def test_valuation_of_zero_is_infinite():
    assert valuation(0, 3) is INFINITY
    assert valuation(0, 3) > 10**9


@given(nonzero, nonzero)
def test_valuation_is_additive(a, b):
    assert valuation(Fraction(a, b) * 9, 3) == valuation(a, 3) - valuation(b, 3) + 2


@given(nonzero)
def test_unit_part_is_a_unit(a):
    u = unit_part(Fraction(a, 25), 5)
    assert valuation(u, 5) == 0
    assert u * Fraction(5) ** valuation(Fraction(a, 25), 5) == Fraction(a, 25)


def test_legendre_and_chi():
    assert [legendre(a, 7) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]
    assert chi(Fraction(2, 9), 3) == -1
    assert chi(3, 3) == 0
    assert smallest_nonresidue(3) == 2
    assert smallest_nonresidue(7) == 3


def test_to_residue():
    assert to_residue(Fraction(1, 2), 3, 2) == 5
    with pytest.raises(InvalidInput):
        to_residue(Fraction(1, 3), 3, 2)


def test_hilbert_known_values():
    assert hilbert(-1, -1, 2) == -1
    assert hilbert(-1, -1, "inf") == -1
    assert hilbert(-1, -1, 3) == 1
    assert hilbert(3, 2, 3) == -1
    assert hilbert(3, -1, 3) == -1


@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    places = _primes_up_to(500) + ["inf"]
    prod = 1
    for v in places:
        prod *= hilbert(a, b, v)
    assert prod == 1


@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_hilbert_is_bimultiplicative(a, b, c, p):
    assert hilbert(a * b, c, p) == hilbert(a, c, p) * hilbert(b, c, p)
    assert hilbert(a, b, p) == hilbert(b, a, p)


@given(nonzero, st.sampled_from([2, 3, 5]))
def test_hilbert_with_norm_forms(a, p):
    # (a, -a) = (a, 1 - a) = 1
    assert hilbert(a, -a, p) == 1
    if a != 1:
        assert hilbert(a, 1 - a, p) == 1
