import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krden.errors import InvalidInput
from krden.lattice_algebra import (
    QuadLattice,
    catalog,
    diagonal,
    diagonalize,
    dual,
    fundamental_invariants,
    h0p,
    heps,
    hyperbolic,
    invariants,
    is_anisotropic,
    is_isometric,
    jordan,
    make,
    ortho_complement,
    orthosum,
    parse_lattice,
    rescale,
)
from krden.padic_arith import valuation

P = 3


def _congruent(lat, g):
    n = lat.rank
    return make(
        lat.p,
        [[sum(g[k][i] * lat.gram[k][l] * g[l][j] for k in range(n) for l in range(n)) for j in range(n)] for i in range(n)],
    )


def _random_unimodular(n, rng, p):
    while True:
        g = [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(n)]
        d = QuadLattice(p, tuple(tuple(Fraction(x) for x in row) for row in g)).det
        if d != 0 and valuation(d, p) == 0:
            return g


def _isotropic_by_search(lat, depth=4):
    # nonzero primitive x mod p^depth with q(x) = 0 mod p^depth, scaled to integers
    p = lat.p
    scale = Fraction(p) ** max(0, -lat.min_valuation()) * 2
    g = [[int(scale * x) for x in row] for row in lat.gram]
    mod = p**depth
    n = lat.rank
    for x in itertools.product(range(mod), repeat=n):
        if all(c % p == 0 for c in x):
            continue
        if sum(g[i][j] * x[i] * x[j] for i in range(n) for j in range(n)) % mod == 0:
            return True
    return False


def test_make_validates():
    with pytest.raises(InvalidInput):
        make(4, [[1]])
    with pytest.raises(InvalidInput):
        make(3, [[1, 2], [3, 1]])
    with pytest.raises(InvalidInput):
        make(3, [[1, 1], [1, 1]])


def test_worked_plane_has_unimodular_invariants():
    lat = make(3, [[3, 1], [1, 3]])
    assert lat.det == 8
    assert fundamental_invariants(lat) == [0, 0]


def test_h0p_invariants_and_dual():
    lat = h0p(P)
    assert fundamental_invariants(lat) == [0, 0, 1, 1]
    assert is_isometric(rescale(dual(lat), P), lat)
    assert fundamental_invariants(dual(lat)) == [-1, -1, 0, 0]


def test_heps_signs():
    for k in range(1, 5):
        for eps in (1, -1):
            (block,) = jordan(heps(P, k, eps))
            assert (block.rank, block.eps) == (k, eps)
    assert jordan(hyperbolic(P, 1))[0].eps == 1


def test_trace_zero_and_order_catalog():
    assert fundamental_invariants(catalog("S_trace0", P)) == [0, 0, 0]
    assert fundamental_invariants(catalog("OB", P)) == [0, 0, 1, 1]
    assert not is_anisotropic(catalog("S_trace0", P))
    assert is_anisotropic(catalog("OB", P))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([1, 2, 3, 6, 9, 18]), min_size=1, max_size=4), st.integers(0, 10**6))
def test_jordan_invariants_survive_basis_change(entries, seed):
    lat = diagonal(P, entries)
    moved = _congruent(lat, _random_unimodular(len(entries), random.Random(seed), P))
    assert jordan(moved) == jordan(lat)
    assert invariants(moved) == invariants(lat)
    assert sorted(valuation(d, P) for d in diagonalize(moved)) == fundamental_invariants(lat)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([1, 2, 3, 6, 9]), min_size=2, max_size=3))
def test_anisotropy_matches_search(entries):
    lat = diagonal(P, entries)
    assert is_anisotropic(lat) == (not _isotropic_by_search(lat))


def test_orthosum_and_rescale():
    lat = orthosum(diagonal(P, [1]), hyperbolic(P, 1))
    assert lat.rank == 3
    assert fundamental_invariants(rescale(lat, 9)) == [2, 2, 2]


def test_ortho_complement():
    lat = diagonal(P, [1, 1, 3])
    comp = ortho_complement(lat, [1, 0, 0])
    assert is_isometric(comp, diagonal(P, [1, 3]))
    with pytest.raises(InvalidInput):
        ortho_complement(lat, [3, 0, 0])
    with pytest.raises(InvalidInput):
        ortho_complement(hyperbolic(P, 1), [1, 0])


def test_parse_lattice_roundtrip():
    for text in ("diag:1,3,9", "H+:3", "H-:2", "H0(p)", "H0(p)^", "S", "OB", "OB^"):
        lat = parse_lattice(text, P)
        again = parse_lattice(json.dumps(lat.to_json()), P)
        assert again == lat
        assert parse_lattice(str(again), P) == lat
    with pytest.raises(InvalidInput):
        parse_lattice("nonsense", P)
