from fractions import Fraction

import numpy as np
import pytest

from krden import class_counting as cc
from krden.errors import BudgetExceeded, InvalidInput
from krden.lattice_algebra import diagonal
from krden.rep_counting import count_reps

P = 3


def test_class_counts_of_binary_forms():
    assert [cc.class_table(P, d, 2).K for d in (1, 2, 3)] == [5, 13, 25]


def test_classes_partition_the_space():
    table = cc.class_table(P, 2, 2)
    assert int(table.sizes.sum()) == P ** (2 * 3)


def test_structure_constants_sum_to_class_sizes():
    table = cc.class_table(P, 2, 2)
    # for fixed A3, every A1 lands in exactly one (c1, c2)
    assert np.all(table.structure.sum(axis=1) == table.sizes[:, None])


def test_class_of_is_invariant_under_congruence():
    table = cc.class_table(P, 2, 2)
    q = P**2
    a, b, c = 3, 1, 5
    # g = [[1, 1], [0, 1]] acting by g A g^T
    moved = ((a + 2 * b + c) % q, (b + c) % q, c)
    assert table.class_of((a, b, c)) == table.class_of(moved)


@pytest.mark.parametrize(
    "target,source,d",
    [
        ([1, 1, 1], [1], 2),
        ([1, 2, 3], [3], 2),
        ([1, -1, 3, -3], [1, 3], 2),
        ([1, 1, 3], [2, 6], 2),
        ([1, -1, 3], [9], 3),
        ([3, -3, 1, -1], [3, 9], 3),
    ],
)
def test_convolution_matches_digit_search(target, source, d):
    brute = count_reps(diagonal(P, target), diagonal(P, source), d)
    assert cc.count_diagonal(target, source, P, d) == brute


def test_cache_can_be_disabled(monkeypatch, tmp_path):
    monkeypatch.setenv("KRDEN_CACHE", "off")
    fresh = cc.ClassTable(P, 2, 2)
    monkeypatch.setenv("KRDEN_CACHE", str(tmp_path))
    stored = cc.ClassTable(P, 2, 2)
    loaded = cc.ClassTable(P, 2, 2)
    assert list(tmp_path.iterdir())
    assert np.array_equal(fresh.structure, loaded.structure)
    assert np.array_equal(stored.codes, loaded.codes)


def test_density_diagonal_values():
    assert cc.density_diagonal((Fraction(1), Fraction(-1)), (Fraction(1),), P) == Fraction(2, 3)
    assert cc.density_diagonal((Fraction(3), Fraction(-3)), (Fraction(3),), P) == 2


def test_limits():
    with pytest.raises(InvalidInput):
        cc.ClassTable(P, 1, 3)
    with pytest.raises(BudgetExceeded):
        cc.ClassTable(P, 6, 2)
    with pytest.raises(InvalidInput):
        cc.count_diagonal([1, 1], [Fraction(1, 3)], P, 2)
