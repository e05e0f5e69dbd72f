import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krden import density_poly as dp
from krden import global_series as gs
from krden.errors import InvalidInput
from krden.verify import isotropic_by_search

ALL_SMALL = [t for m in itertools.product(range(1, 3), repeat=3) for t in gs.enumerate_t(*m)]


def _diag(a, b, c):
    return gs.parse_t(f"{a},0,0,{b},0,{c}")


def test_enumeration_of_the_unit_diagonal():
    brute = 0
    for k12, k13, k23 in itertools.product(range(-1, 2), repeat=3):
        h = Fraction(1, 2)
        t = ((1, k12 * h, k13 * h), (k12 * h, 1, k23 * h), (k13 * h, k23 * h, 1))
        brute += gs._det3(t) > 0
    assert len(gs.enumerate_t(1, 1, 1)) == brute == 23


def test_enumeration_is_symmetric_in_the_diagonal():
    assert len(gs.enumerate_t(1, 1, 3)) == len(gs.enumerate_t(1, 3, 1)) == len(gs.enumerate_t(3, 1, 1))
    with pytest.raises(InvalidInput):
        gs.enumerate_t(0, 1, 1)


def test_parse_t():
    assert gs.parse_t("1,0,0,0,1,0,0,0,3") == _diag(1, 1, 3)
    with pytest.raises(InvalidInput):
        gs.parse_t("1,1,0,0,1,0,0,0,3")
    with pytest.raises(InvalidInput):
        gs.parse_t("1,2,3")


@pytest.mark.parametrize("t", ALL_SMALL[::7])
def test_diff_sets_have_odd_size(t):
    assert len(gs.diff_set(t)) % 2 == 1


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(ALL_SMALL), st.sampled_from([2, 3, 5, 7]))
def test_isotropy_matches_search(t, v):
    assert gs.is_isotropic_at(t, v) == isotropic_by_search(t, v)


def test_known_diff_sets():
    assert gs.diff_set(_diag(1, 1, 3)) == {3}
    assert gs.diff_set(_diag(1, 1, 1)) == {2}
    assert not gs.is_isotropic_at(_diag(1, 1, 3), 3)
    # primes away from 2 det(2T) never enter
    assert gs.is_isotropic_at(_diag(1, 1, 3), 5)


def test_whittaker_factors():
    t = _diag(1, 1, 3)
    assert gs.whittaker_factor(t, 3, 0) == dp.den_at(gs.standard_lattice(3), gs.local_lattice(t, 3), 0)
    assert gs.det_factor(gs.standard_lattice(3, "h0p")) == Fraction(1, 27)
    assert gs.det_factor(gs.standard_lattice(3, "h0pdual")) == 27
    with pytest.raises(InvalidInput):
        gs.whittaker_factor(t, 2, 0)
    with pytest.raises(InvalidInput):
        gs.standard_lattice(3, "other")


def test_local_intersection_terms():
    assert gs.kr_local_term(_diag(1, 1, 3), 3).value == -1
    assert gs.kr_local_term(_diag(1, 3, 3), 3).value == 0
    assert gs.kr_local_term(_diag(1, 1, 3), 3, "Y").to_json()["kind"] == "Y"
    with pytest.raises(InvalidInput):
        gs.kr_local_term(_diag(1, 1, 1), 3)
    with pytest.raises(InvalidInput):
        gs.kr_local_term(_diag(1, 1, 3), 3, "X")
