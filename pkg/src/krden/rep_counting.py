"""Brute-force representation counting mod p^d and the closed rank-1 primitive densities."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from krden import _dfs
from krden.errors import InvalidInput, NotStabilized
from krden.lattice_algebra import QuadLattice, fundamental_invariants
from krden.padic_arith import chi, rat, to_residue, valuation

try:
    from krden import _kernels
except ImportError:  # pragma: no cover - exercised when the extension is not built
    _kernels = None

BACKEND = "cython" if _kernels is not None else "python"
DEFAULT_BUDGET = 200_000_000


def node_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("KRDEN_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class RepCount:
    count: int
    depth: int
    normalized: Fraction
    stabilized: bool

    def to_json(self) -> dict:
        from krden.padic_arith import rat_str

        return {"count": str(self.count), "normalized": rat_str(self.normalized), "stabilized": self.stabilized}


def rep_dim(m: int, n: int) -> int:
    return m * n - n * (n + 1) // 2


def _clearing_exponent(M: QuadLattice, L: QuadLattice) -> int:
    vals = [valuation(x, M.p) for lat in (M, L) for row in lat.gram for x in row if x != 0]
    return max(0, -min(vals)) if vals else 0


def _residue_matrix(lat: QuadLattice, scale: int, D: int) -> list[list[int]]:
    p = lat.p
    return [[to_residue(x * Fraction(p) ** scale, p, D) for x in row] for row in lat.gram]


def _histogram(M, L, D, e, primitive, budget, backend):
    S = _residue_matrix(M, e, D)
    T = _residue_matrix(L, e, D)
    use = backend or BACKEND
    if use == "cython":
        if _kernels is None:
            raise InvalidInput("compiled kernel is not available")
        return _kernels.layer_histogram(S, T, M.p, D, primitive, budget)
    return _dfs.layer_histogram(S, T, M.p, D, primitive, budget)


def _raw_count(M: QuadLattice, L: QuadLattice, d: int, primitive: bool, budget: int | None, backend: str | None):
    if M.p != L.p:
        raise InvalidInput("prime mismatch")
    if d < 1:
        raise InvalidInput("depth must be positive")
    if L.rank == 0:
        return 1, d, 0
    if M.is_integral() and not L.is_integral():
        return 0, d, 0
    e = _clearing_exponent(M, L)
    D = d + e
    hist, _ = _histogram(M, L, D, e, primitive, node_budget(budget), backend)
    return sum(mult * M.p**f for f, mult in hist.items()), D, e


def count_reps(M: QuadLattice, L: QuadLattice, d: int, *, budget: int | None = None, backend: str | None = None) -> int:
    """Number of phi mod p^d with phi^T S_M phi = S_L (after clearing denominators)."""
    return _raw_count(M, L, d, False, budget, backend)[0]


def count_prim_reps(
    M: QuadLattice, L: QuadLattice, d: int, *, budget: int | None = None, backend: str | None = None
) -> int:
    """As count_reps, restricted to phi whose reduction mod p has full rank.

    Over Z/p^d this is also the set of injective module maps, so the two readings of
    "representation" that exclude degenerate maps coincide here.
    """
    return _raw_count(M, L, d, True, budget, backend)[0]


def normalized_count(
    M: QuadLattice, L: QuadLattice, d: int, *, primitive: bool = False, budget: int | None = None,
    backend: str | None = None,
) -> RepCount:
    count, D, e = _raw_count(M, L, d, primitive, budget, backend)
    n = L.rank
    dim = rep_dim(M.rank, n)
    q = Fraction(M.p)
    norm = count * q ** (-D * dim) / q ** (e * n * (n + 1) // 2)
    return RepCount(count, d, norm, False)


def start_depth(L: QuadLattice) -> int:
    inv = fundamental_invariants(L) if L.rank else [0]
    return max(1, max(inv) + 1)


def density(
    M: QuadLattice, L: QuadLattice, *, primitive: bool = False, d0: int | None = None, extra: int = 1,
    budget: int | None = None, backend: str | None = None,
) -> RepCount:
    """Normalized count at the first depth that agrees with the next one."""
    if M.is_integral() and not L.is_integral():
        return RepCount(0, 1, Fraction(0), True)
    d = d0 if d0 is not None else start_depth(L)
    prev = normalized_count(M, L, d, primitive=primitive, budget=budget, backend=backend)
    for _ in range(extra + 1):
        nxt = normalized_count(M, L, prev.depth + 1, primitive=primitive, budget=budget, backend=backend)
        if nxt.normalized == prev.normalized:
            return RepCount(prev.count, prev.depth, prev.normalized, True)
        prev = nxt
    raise NotStabilized("normalized counts did not stabilize", prev.normalized, nxt.normalized)


def naive_count(M: QuadLattice, L: QuadLattice, d: int, primitive: bool = False) -> int:
    """Full enumeration over (Z/p^d)^{m x n}; only for tiny instances."""
    p = M.p
    if M.is_integral() and not L.is_integral():
        return 0
    e = _clearing_exponent(M, L)
    D = d + e
    mod = p**D
    S = _residue_matrix(M, e, D)
    T = _residue_matrix(L, e, D)
    m, n = M.rank, L.rank
    total = 0
    for flat in product(range(mod), repeat=m * n):
        cols = [flat[j * m:(j + 1) * m] for j in range(n)]
        ok = all(
            sum(cols[i][k] * S[k][l] * cols[j][l] for k in range(m) for l in range(m)) % mod == T[i][j]
            for i in range(n)
            for j in range(i, n)
        )
        if ok and primitive:
            ok = _dfs._rank_mod_p([[x % p for x in c] for c in cols], p) == n
        total += ok
    return total


# ------------------------------------------------------------ closed rank-1 forms


def pden_closed(k: int, eps: int, s: object, p: int) -> Fraction:
    """Primitive density of a vector of norm s in the rank-k self-dual H_k^eps; 0 if s is not integral."""
    s = rat(s)
    if k == 0:
        return Fraction(0)
    if s == 0:
        raise InvalidInput("norm must be nonzero")
    if valuation(s, p) < 0:
        return Fraction(0)
    q = Fraction(p)
    divisible = valuation(s, p) >= 1
    if k % 2:
        if divisible:
            return 1 - q ** (1 - k)
        return 1 + eps * chi(s, p) * q ** ((1 - k) // 2)
    if divisible:
        return (1 - eps * q ** (-k // 2)) * (1 + eps * q ** (1 - k // 2))
    return 1 - eps * q ** (-k // 2)


def den_vertex_rank1(n1: int, eps1: int, n2: int, eps2: int, s: object, p: int) -> Fraction:
    """Den(H_{n1}^{eps1}[p] + H_{n2}^{eps2}, <x>) with q(x) = s, summed over imprimitivity strata."""
    s = rat(s)
    v = valuation(s, p)
    if v < 0:
        return Fraction(0)
    q = Fraction(p)
    total = Fraction(0)
    for i in range(v // 2 + 1):
        y = s / q ** (2 * i)
        term = q ** (1 - n2) * pden_closed(n1, eps1, y / p, p) + pden_closed(n2, eps2, y, p)
        total += q ** (i * (2 - n1 - n2)) * term
    return total
