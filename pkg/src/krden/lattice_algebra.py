"""Quadratic lattices over Z_p (p odd) stored as exact half-integral Gram matrices.

Entry (i, j) of a Gram matrix is (x_i, x_j)/2 and the diagonal holds q(x_i),
where (x, y) = q(x + y) - q(x) - q(y).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from krden.errors import InvalidInput
from krden.padic_arith import (
    INFINITY,
    chi,
    hilbert,
    rat,
    rat_str,
    smallest_nonresidue,
    unit_part,
    valuation,
)

Matrix = tuple[tuple[Fraction, ...], ...]
HALF = Fraction(1, 2)


def _as_matrix(rows: Iterable[Iterable[object]]) -> Matrix:
    return tuple(tuple(rat(x) for x in row) for row in rows)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _inverse(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _congruent(g: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    """b^T g b for a basis matrix b whose columns are the new basis vectors."""
    n, k = len(b), len(b[0])
    gb = [[sum(g[i][t] * b[t][j] for t in range(n)) for j in range(k)] for i in range(n)]
    return tuple(
        tuple(sum(b[t][i] * gb[t][j] for t in range(n)) for j in range(k)) for i in range(k)
    )


@dataclass(frozen=True)
class QuadLattice:
    p: int
    gram: Matrix

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> Fraction:
        return _det(self.gram) if self.gram else Fraction(1)

    def is_integral(self) -> bool:
        return all(valuation(x, self.p) >= 0 for row in self.gram for x in row)

    def min_valuation(self) -> int:
        return min(valuation(x, self.p) for row in self.gram for x in row)

    def to_json(self) -> dict:
        return {"p": self.p, "gram": [[rat_str(x) for x in row] for row in self.gram]}

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def make(p: int, gram: Iterable[Iterable[object]]) -> QuadLattice:
    if p < 3 or p % 2 == 0 or any(p % q == 0 for q in range(3, math.isqrt(p) + 1, 2)):
        raise InvalidInput(f"p must be an odd prime, got {p}")
    g = _as_matrix(gram)
    n = len(g)
    if any(len(row) != n for row in g):
        raise InvalidInput("Gram matrix must be square")
    for i in range(n):
        for j in range(n):
            if g[i][j] != g[j][i]:
                raise InvalidInput("Gram matrix must be symmetric")
    if n and _det(g) == 0:
        raise InvalidInput("Gram matrix is singular")
    return QuadLattice(p, g)


def empty(p: int) -> QuadLattice:
    return QuadLattice(p, ())


def diagonal(p: int, entries: Iterable[object]) -> QuadLattice:
    es = [rat(e) for e in entries]
    return make(p, [[es[i] if i == j else 0 for j in range(len(es))] for i in range(len(es))])


def rescale(lat: QuadLattice, c: object) -> QuadLattice:
    c = rat(c)
    if c == 0:
        raise InvalidInput("cannot rescale by zero")
    return QuadLattice(lat.p, tuple(tuple(c * x for x in row) for row in lat.gram))


def orthosum(*lats: QuadLattice) -> QuadLattice:
    ps = {lat.p for lat in lats}
    if len(ps) > 1:
        raise InvalidInput("prime mismatch in orthogonal sum")
    n = sum(lat.rank for lat in lats)
    rows = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for lat in lats:
        for i, row in enumerate(lat.gram):
            for j, x in enumerate(row):
                rows[off + i][off + j] = x
        off += lat.rank
    return QuadLattice(ps.pop(), _as_matrix(rows))


def dual(lat: QuadLattice) -> QuadLattice:
    """Gram of the dual basis, which is G^{-1}/4 in the half-Gram convention."""
    inv = _inverse(lat.gram)
    return QuadLattice(lat.p, tuple(tuple(x / 4 for x in row) for row in inv))


def diagonalize(lat: QuadLattice) -> list[Fraction]:
    """Diagonal entries of an orthogonal Z_p-basis, ordered by valuation."""
    p = lat.p
    g = [list(r) for r in lat.gram]
    out: list[Fraction] = []
    while g:
        n = len(g)
        best = min(
            ((valuation(g[i][j], p), i != j, i, j) for i in range(n) for j in range(i, n) if g[i][j]),
            default=None,
        )
        if best is None:
            raise InvalidInput("degenerate Gram matrix")
        _, off, i, j = best
        if off:
            # x_i <- x_i + x_j makes the diagonal entry attain the minimal valuation
            g[i] = [a + b for a, b in zip(g[i], g[j])]
            for r in range(n):
                g[r][i] += g[r][j]
        piv = g[i][i]
        for k in range(n):
            if k != i and g[k][i]:
                f = g[k][i] / piv
                g[k] = [a - f * b for a, b in zip(g[k], g[i])]
                for r in range(n):
                    g[r][k] -= f * g[r][i]
        out.append(piv)
        g = [[g[r][c] for c in range(n) if c != i] for r in range(n) if r != i]
    return sorted(out, key=lambda x: valuation(x, p))


@dataclass(frozen=True)
class JordanBlock:
    exponent: int
    rank: int
    eps: int  # chi of the discriminant of the unimodular block p^{-exponent} L_i


def disc_chi(rank: int, det_chi: int, p: int) -> int:
    return det_chi * (1 if (rank * (rank - 1) // 2) % 2 == 0 or p % 4 == 1 else -1)


def jordan(lat: QuadLattice) -> list[JordanBlock]:
    p = lat.p
    groups: dict[int, list[Fraction]] = {}
    for d in diagonalize(lat):
        groups.setdefault(valuation(d, p), []).append(unit_part(d, p))
    blocks = []
    for e in sorted(groups):
        units = groups[e]
        det_chi = 1
        for u in units:
            det_chi *= chi(u, p)
        blocks.append(JordanBlock(e, len(units), disc_chi(len(units), det_chi, p)))
    return blocks


def fundamental_invariants(lat: QuadLattice) -> list[int]:
    return [b.exponent for b in jordan(lat) for _ in range(b.rank)]


gk_invariants = fundamental_invariants


def is_isometric(a: QuadLattice, b: QuadLattice) -> bool:
    return a.p == b.p and jordan(a) == jordan(b)


@dataclass(frozen=True)
class SpaceInvariants:
    rank: int
    disc: Fraction  # canonical square-class representative
    hasse: int
    chi: int


def square_class_rep(x: Fraction, p: int) -> Fraction:
    v = valuation(x, p)
    u = unit_part(x, p)
    base = Fraction(1) if chi(u, p) == 1 else Fraction(smallest_nonresidue(p))
    return base * (p if v % 2 else 1)


def invariants(lat: QuadLattice) -> SpaceInvariants:
    p = lat.p
    d = diagonalize(lat)
    n = len(d)
    det = Fraction(1)
    for x in d:
        det *= x
    disc = det * (-1) ** (n * (n - 1) // 2)
    hasse = 1
    for i in range(n):
        for j in range(i + 1, n):
            hasse *= hilbert(d[i], d[j], p)
    return SpaceInvariants(n, square_class_rep(disc, p), hasse, chi(disc, p))


def is_anisotropic(lat: QuadLattice) -> bool:
    p = lat.p
    d = diagonalize(lat)
    n = len(d)
    det = Fraction(1)
    for x in d:
        det *= x
    eps = 1
    for i in range(n):
        for j in range(i + 1, n):
            eps *= hilbert(d[i], d[j], p)
    if n == 1:
        return True
    if n == 2:
        return not _is_square(-det, p)
    if n == 3:
        return hilbert(-1, -det, p) != eps
    if n == 4:
        return _is_square(det, p) and eps != hilbert(-1, -1, p)
    return False


def _is_square(x: Fraction, p: int) -> bool:
    return valuation(x, p) % 2 == 0 and chi(x, p) == 1


def ortho_complement(lat: QuadLattice, x: Sequence[object]) -> QuadLattice:
    """Saturated kernel of (x, .) on L, for x given in coordinates of the basis."""
    p = lat.p
    xs = [rat(c) for c in x]
    n = lat.rank
    if len(xs) != n or any(valuation(c, p) < 0 for c in xs):
        raise InvalidInput("x must be an integral coordinate vector")
    if min(valuation(c, p) for c in xs) != 0:
        raise InvalidInput("x is not primitive")
    c = [sum(2 * lat.gram[i][k] * xs[k] for k in range(n)) for i in range(n)]
    if sum(xs[i] * c[i] for i in range(n)) == 0:
        raise InvalidInput("x is isotropic")
    j = min(range(n), key=lambda i: valuation(c[i], p))
    basis = [[Fraction(0)] * (n - 1) for _ in range(n)]
    col = 0
    for i in range(n):
        if i == j:
            continue
        basis[i][col] = Fraction(1)
        basis[j][col] = -c[i] / c[j]
        col += 1
    return QuadLattice(p, _congruent(lat.gram, basis))


# ---------------------------------------------------------------- catalog

H2_PLUS = ((Fraction(0), HALF), (HALF, Fraction(0)))


def hyperbolic(p: int, k: int) -> QuadLattice:
    """H_{2k}^+ as k copies of the plane (x, y) -> xy."""
    return orthosum(empty(p), *[QuadLattice(p, H2_PLUS) for _ in range(k)])


def heps(p: int, k: int, eps: int) -> QuadLattice:
    """Diagonal self-dual lattice of rank k whose discriminant has chi = eps."""
    if k == 0:
        if eps != 1:
            raise InvalidInput("rank-0 self-dual lattice has eps = +1")
        return empty(p)
    last = 1 if disc_chi(k, 1, p) == eps else smallest_nonresidue(p)
    return diagonal(p, [1] * (k - 1) + [last])


def h0p(p: int) -> QuadLattice:
    return orthosum(rescale(QuadLattice(p, H2_PLUS), p), QuadLattice(p, H2_PLUS))


def s_trace0(p: int) -> QuadLattice:
    return make(p, [[-1, 0, 0], [0, 0, Fraction(-1, 2)], [0, Fraction(-1, 2), 0]])


def ob(p: int, u: int | None = None) -> QuadLattice:
    u = smallest_nonresidue(p) if u is None else u
    return diagonal(p, [1, -u, -p, u * p])


def catalog(name: str, p: int, *params: int, u: int | None = None) -> QuadLattice:
    if name == "Hplus2k":
        return hyperbolic(p, params[0])
    if name == "Heps":
        return heps(p, params[0], params[1])
    if name == "H0p":
        return h0p(p)
    if name == "H0pDual":
        return dual(h0p(p))
    if name == "S_trace0":
        return s_trace0(p)
    if name in ("OB", "Bnorm"):
        return ob(p, u)
    if name == "OBDual":
        return dual(ob(p, u))
    raise InvalidInput(f"unknown lattice name {name!r}")


def parse_lattice(text: "str | dict", p: int = 3) -> QuadLattice:
    """Parse a JSON literal or one of the shorthands diag:..., H+:k, H-:k, H0(p), H0(p)^, S, OB, OB^."""
    if isinstance(text, dict):
        return make(int(text.get("p", p)), text["gram"])
    s = text.strip()
    if s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"bad lattice JSON: {exc}") from exc
        return make(int(obj.get("p", p)), obj["gram"])
    if s.startswith("diag:"):
        return diagonal(p, [x for x in s[5:].split(",") if x.strip()])
    if s[:3] in ("H+:", "H-:"):
        return heps(p, int(s[3:]), 1 if s[1] == "+" else -1)
    table = {"H0(p)": "H0p", "H0(p)^": "H0pDual", "S": "S_trace0", "OB": "OB", "OB^": "OBDual"}
    if s in table:
        return catalog(table[s], p)
    raise InvalidInput(f"unrecognised lattice literal {text!r}")


__all__ = [
    "INFINITY",
    "JordanBlock",
    "QuadLattice",
    "SpaceInvariants",
    "catalog",
    "diagonal",
    "diagonalize",
    "dual",
    "empty",
    "fundamental_invariants",
    "gk_invariants",
    "heps",
    "h0p",
    "hyperbolic",
    "invariants",
    "is_anisotropic",
    "is_isometric",
    "jordan",
    "make",
    "ob",
    "ortho_complement",
    "orthosum",
    "parse_lattice",
    "rescale",
]
