import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krden import kr_engine as kr
from krden.errors import InvalidInput
from krden.lattice_algebra import diagonal, is_anisotropic, make, orthosum, rescale
from krden.verify import anisotropic_diagonals

P = 3


def _basis_change(lat, seed):
    rng = random.Random(seed)
    while True:
        g = [[rng.randrange(-2, 3) for _ in range(3)] for _ in range(3)]
        d = (
            g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
        )
        if d % P:
            break
    n = 3
    return make(
        P,
        [[sum(g[k][i] * lat.gram[k][l] * g[l][j] for k in range(n) for l in range(n)) for j in range(n)] for i in range(n)],
    )


def test_base_values():
    assert kr.dden_h0p(diagonal(P, [1, 1, 3])).value == -1
    assert kr.dden_h0p(diagonal(P, [1, 3, 3])).value == 0
    assert kr.dden_h0p(diagonal(P, [1, 1, 3])).route == "base-case"


def test_recursion_trace_records_each_step():
    res = kr.dden_h0p(diagonal(P, [1, 1, 3**5]))
    assert [s.invariants for s in res.trace] == [(0, 0, 5), (0, 0, 3)]
    assert res.value == -1 + sum(s.delta for s in res.trace)
    assert all(s.delta == 2 * s.aug_scaled + 2 * s.aug_split for s in res.trace)
    assert res.to_json()["value"] == str(res.value)


@pytest.mark.parametrize("entries", anisotropic_diagonals(P, 3))
def test_routes_agree(entries):
    L = diagonal(P, entries)
    values = {kr.dden_h0p(L, route=r).value for r in ("recursion", "stepwise", "interpolation")}
    assert len(values) == 1
    dual_values = {kr.dden_h0p_dual(L, route=r).value for r in ("recursion", "interpolation")}
    assert len(dual_values) == 1


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(anisotropic_diagonals(P, 5)))
def test_values_are_integers(entries):
    L = diagonal(P, entries)
    assert kr.dden_h0p(L).value.denominator == 1
    assert kr.int_y(L).denominator == 1


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(anisotropic_diagonals(P, 4)), st.integers(0, 10**6))
def test_values_depend_only_on_the_isometry_class(entries, seed):
    L = diagonal(P, entries)
    moved = _basis_change(L, seed)
    assert kr.dden_h0p(moved).value == kr.dden_h0p(L).value


def test_dual_is_shifted_h0p_of_rescaled_lattice():
    for entries in anisotropic_diagonals(P, 4):
        L = diagonal(P, entries)
        assert kr.dden_h0p_dual(L).value == kr.dden_h0p(rescale(L, P)).value + 1
    L = orthosum(diagonal(P, [Fraction(1, 3)]), diagonal(P, [1, 1]))
    assert kr.dden_h0p_dual(L).value == 1
    assert kr.int_y(L) == 0


def test_int_z_on_empty_cycles():
    assert kr.int_z(diagonal(P, [2, 1, 3])) == 0
    assert kr.int_z(diagonal(P, [Fraction(1, 3), 1, 1])) == 0
    with pytest.raises(InvalidInput):
        kr.int_z(diagonal(P, [1, 1]))


def test_int_cm():
    assert kr.int_cm(diagonal(P, [1, 3])) == kr.dden_h0p(diagonal(P, [1, 1, 3])).value
    with pytest.raises(InvalidInput):
        kr.int_cm(diagonal(P, [1, 2]))
    with pytest.raises(InvalidInput):
        kr.int_cm(diagonal(P, [1, 1, 3]))


def test_input_checks():
    with pytest.raises(InvalidInput):
        kr.dden_h0p(diagonal(P, [1, 2, 3]))
    with pytest.raises(InvalidInput):
        kr.dden_h0p(diagonal(P, [Fraction(1, 3), 1, 1]))
    with pytest.raises(InvalidInput):
        kr.dden_h0p_dual(diagonal(P, [Fraction(1, 9), 1, 1]))


def test_hyperspecial_values_and_step_identity():
    assert kr.hyperspecial_normalizer(P) == Fraction(64, 81)
    assert kr.dden_hyperspecial(diagonal(P, [1, 1, 3])).value == 1
    assert kr.dden_hyperspecial(diagonal(P, [Fraction(1, 3), 1, 1])).value == 0
    for entries, value in [([1, 1, 27], 2), ([1, 3, 9], 3), ([1, 3, 27], 4), ([3, 3, 9], 10)]:
        L = diagonal(P, entries)
        if not is_anisotropic(L):
            L = diagonal(P, [2 * entries[0]] + entries[1:])
        assert kr.dden_hyperspecial(L).value == value


@pytest.mark.slow
def test_hyperspecial_recursion_matches_interpolation():
    for entries in ([1, 1, 27], [1, 3, 9]):
        L = diagonal(P, entries)
        if not is_anisotropic(L):
            L = diagonal(P, [2 * entries[0]] + entries[1:])
        assert kr.dden_hyperspecial(L).value == kr.dden_hyperspecial(L, route="interpolation").value
