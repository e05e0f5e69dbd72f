"""Pure-Python digit-layer search over representations mod p^D.

Layer 0 picks phi mod p column by column.  Every later layer adds one p-adic
digit: for t >= 1 the congruence mod p^{t+1} is linear in the new digit, so
children are enumerated from the affine solution space instead of by trial.
The compiled twin lives in _kernels.pyx and returns the same histogram.
"""

from __future__ import annotations

from itertools import product

from krden.errors import BudgetExceeded


def _solve_mod_p(rows: list[list[int]], rhs: list[int], nvar: int, p: int):
    """Row-reduce A x = b over F_p; return (particular, nullspace basis) or None."""
    a = [r[:] + [b] for r, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for c in range(nvar):
        piv = next((i for i in range(r, len(a)) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    if any(row[nvar] % p for row in a[r:]):
        return None
    part = [0] * nvar
    for i, c in enumerate(pivots):
        part[c] = a[i][nvar]
    free = [c for c in range(nvar) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * nvar
        v[fc] = 1
        for i, c in enumerate(pivots):
            v[c] = -a[i][fc] % p
        basis.append(v)
    return part, basis


def _rank_mod_p(cols: list[list[int]], p: int) -> int:
    rows = [c[:] for c in cols]
    rank = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c] * inv
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def layer_histogram(
    S: list[list[int]],
    T: list[list[int]],
    p: int,
    D: int,
    primitive: bool,
    budget: int,
) -> tuple[dict[int, int], int]:
    """Return ({free_dim: number of depth-(D-1) nodes}, nodes visited).

    The total count is sum(mult * p**f).  S is m x m and T is n x n, both
    reduced mod p^D.
    """
    m, n = len(S), len(T)
    hist: dict[int, int] = {}
    visited = 0
    vecs = list(product(range(p), repeat=m))
    sv = [[sum(S[k][l] * v[l] for l in range(m)) % p for k in range(m)] for v in vecs]
    qv = [sum(v[k] * s[k] for k in range(m)) % p for v, s in zip(vecs, sv)]

    def lift(phi: list[list[int]], t: int) -> None:
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        mod = p ** (t + 1)
        sphi = [[sum(S[k][l] * phi[j][l] for l in range(m)) % mod for k in range(m)] for j in range(n)]
        rows, rhs = [], []
        for i in range(n):
            for j in range(i, n):
                val = (sum(phi[i][k] * sphi[j][k] for k in range(m)) - T[i][j]) % mod
                rhs.append((-(val // p**t)) % p)
                row = [0] * (m * n)
                for k in range(m):
                    row[i * m + k] += sphi[j][k] % p
                    row[j * m + k] += sphi[i][k] % p
                rows.append(row)
        sol = _solve_mod_p(rows, rhs, m * n, p)
        if sol is None:
            return
        part, basis = sol
        if t == D - 1:
            f = len(basis)
            hist[f] = hist.get(f, 0) + 1
            return
        scale = p**t
        for coeffs in product(range(p), repeat=len(basis)):
            delta = part[:]
            for c, b in zip(coeffs, basis):
                if c:
                    delta = [(x + c * y) % p for x, y in zip(delta, b)]
            child = [[phi[j][k] + scale * delta[j * m + k] for k in range(m)] for j in range(n)]
            lift(child, t + 1)

    def layer0(cols: list[int]) -> None:
        nonlocal visited
        j = len(cols)
        if j == n:
            if primitive and _rank_mod_p([list(vecs[c]) for c in cols], p) < n:
                return
            phi = [list(vecs[c]) for c in cols]
            if D == 1:
                hist[0] = hist.get(0, 0) + 1
            else:
                lift(phi, 1)
            return
        for idx in range(len(vecs)):
            if qv[idx] != T[j][j] % p:
                continue
            s = sv[idx]
            if all(sum(vecs[c][k] * s[k] for k in range(m)) % p == T[i][j] % p for i, c in enumerate(cols)):
                visited += 1
                if visited > budget:
                    raise BudgetExceeded(f"search exceeded {budget} nodes")
                layer0(cols + [idx])

    if n == 0:
        return {0: 1}, 0
    layer0([])
    return hist, visited
