import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krden import hecke_cosets as hc
from krden.errors import InvalidInput
from krden.hecke_cosets import CosetType, Mat2
from krden.verify import _random_gamma0

P = 3


def _h0_matrix(rng):
    while True:
        x = Mat2.of(rng.randrange(-40, 41), rng.randrange(-40, 41), P * rng.randrange(-40, 41), rng.randrange(-40, 41))
        if x.det != 0:
            return x


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_reduction_is_an_exact_identity(seed):
    x = _h0_matrix(random.Random(seed))
    g, cls, h = hc.reduce(x, P)
    assert g.in_gamma0(P) and h.in_gamma0(P)
    assert g @ x @ h == cls.representative(P)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_class_is_constant_on_double_cosets(seed):
    rng = random.Random(seed)
    x = _h0_matrix(rng)
    moved = _random_gamma0(rng, P) @ x @ _random_gamma0(rng, P)
    assert hc.classify(moved, P) == hc.classify(x, P)


@pytest.mark.parametrize(
    "entries,expected",
    [
        ((0, 1, 3, 0), (CosetType.II_PLUS, 0, 1)),
        ((0, 9, 3, 0), (CosetType.II_MINUS, 2, 1)),
        ((1, 0, 0, 9), (CosetType.I_PLUS, 0, 2)),
        ((9, 0, 0, 1), (CosetType.I_MINUS, 2, 0)),
        ((1, 1, 3, 4), (CosetType.I_PLUS, 0, 0)),
    ],
)
def test_known_classes(entries, expected):
    cls = hc.classify(Mat2.of(*entries), P)
    assert (cls.type, cls.a, cls.b) == expected


def test_primitivity():
    assert hc.is_primitive(hc.IDENTITY, P)
    assert not hc.is_primitive(Mat2.of(P, 0, 0, P), P)
    assert hc.is_primitive(Mat2.of(0, P**3, P, 0), P)
    with pytest.raises(InvalidInput):
        hc.is_primitive(Mat2.of(1, 0, 1, 1), P)


@pytest.mark.parametrize("n", range(6))
def test_primitive_representatives_are_distinct_classes(n):
    reps = hc.primitive_representatives(n, P)
    assert len(reps) == hc.class_count(n)
    assert len({hc.classify(m, P) for m in reps}) == len(reps)
    assert all(hc.is_primitive(m, P) for m in reps)


def test_parse_and_json():
    x = Mat2.parse("0,1,3,0")
    assert x == Mat2.of(0, 1, 3, 0)
    assert hc.classify(x, P).to_json() == {"type": "II+", "a": 0, "b": 1}
    assert str(hc.classify(x, P)) == "II+(0,1)"
    with pytest.raises(InvalidInput):
        Mat2.parse("1,2,3")


def test_singular_input():
    with pytest.raises(InvalidInput):
        hc.reduce(Mat2.of(1, 1, 3, 3), P)
    with pytest.raises(InvalidInput):
        hc.class_count(-1)
