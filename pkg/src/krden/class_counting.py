"""Exact representation counts for sources of rank 1 or 2 by convolving value classes.

For a diagonal target <s_1> + ... + <s_m>, the value phi^T S phi is the sum of the
row contributions s_i r_i r_i^T, so the count is an m-fold additive convolution on
Sym_n(Z/p^d).  Every factor is invariant under A -> g A g^T, hence the
convolution can be carried out on GL_n(Z/p^d)-classes once the structure constants
N(C1, C2; A3) = #{A1 in C1 : A3 - A1 in C2} are known.  Those are tabulated by
enumerating Sym_n(Z/p^d) with numpy.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from krden.errors import BudgetExceeded, InvalidInput, NotStabilized
from krden.padic_arith import legendre, to_residue, valuation

MAX_GRID = 20_000_000
CACHE_VERSION = 1


def _cache_path(p: int, d: int, n: int) -> Path | None:
    """On-disk memo for structure constants; KRDEN_CACHE=off disables it."""
    root = os.environ.get("KRDEN_CACHE", str(Path.home() / ".cache" / "krden"))
    if root == "off":
        return None
    return Path(root) / f"classes-v{CACHE_VERSION}-p{p}-d{d}-n{n}.npz"


def _val_array(x: np.ndarray, p: int, d: int) -> np.ndarray:
    v = np.zeros(x.shape, dtype=np.int64)
    for k in range(1, d + 1):
        v += (x % p**k == 0)
    return v


def _chi_table(p: int) -> np.ndarray:
    return np.array([0] + [legendre(a, p) for a in range(1, p)], dtype=np.int64)


class ClassTable:
    """Class ids of Sym_n(Z/p^d) for n in {1, 2}, plus convolution structure constants."""

    def __init__(self, p: int, d: int, n: int):
        if n not in (1, 2):
            raise InvalidInput("class tables exist for ranks 1 and 2")
        size = p ** (d * n * (n + 1) // 2)
        if size > MAX_GRID:
            raise BudgetExceeded(f"class table Sym_{n}(Z/{p}^{d}) has {size} elements")
        self.p, self.d, self.n, self.q = p, d, n, p**d
        self._chi = _chi_table(p)
        self._inv = {k: self._inverse_table(p**k) for k in range(1, d + 1)}
        self._ids: np.ndarray | None = None
        self._structure: np.ndarray | None = None
        self._structure_obj: np.ndarray | None = None
        path = _cache_path(p, d, n)
        if path is not None and path.exists():
            with np.load(path) as data:
                self.codes, self.sizes, self._structure = data["codes"], data["sizes"], data["structure"]
        else:
            ids = self.ids
            self.sizes = np.bincount(ids.ravel(), minlength=len(self.codes))
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                np.savez_compressed(path, codes=self.codes, sizes=self.sizes, structure=self.structure)
        self.K = len(self.codes)

    @property
    def ids(self) -> np.ndarray:
        """Class id of every element of Sym_n(Z/p^d), indexed by its entries."""
        if self._ids is None:
            grid = np.arange(self.q, dtype=np.int64)
            if self.n == 1:
                codes = self._codes1(grid)
            else:
                a, b, c = np.meshgrid(grid, grid, grid, indexing="ij")
                codes = self._codes2(a.ravel(), b.ravel(), c.ravel())
            uniq, ids = np.unique(codes, return_inverse=True)
            self.codes = uniq
            self._ids = ids.reshape((self.q,) * (self.n * (self.n + 1) // 2)).astype(np.int32)
        return self._ids

    def _ids_of(self, *entries: np.ndarray) -> np.ndarray:
        q = self.q
        entries = [np.asarray(e, dtype=np.int64) % q for e in entries]
        codes = self._codes1(entries[0]) if self.n == 1 else self._codes2(*entries)
        return np.searchsorted(self.codes, codes)

    @staticmethod
    def _inverse_table(mod: int) -> np.ndarray:
        t = np.zeros(mod, dtype=np.int64)
        for x in range(mod):
            if x % 2 == 0 and mod % 2 == 0:
                continue
            try:
                t[x] = pow(x, -1, mod)
            except ValueError:
                pass
        return t

    def _sign(self, x: np.ndarray, e: np.ndarray) -> np.ndarray:
        unit = x // np.power(self.p, np.minimum(e, self.d - 1))
        return np.where(e < self.d, self._chi[unit % self.p], 0)

    def _codes1(self, x: np.ndarray) -> np.ndarray:
        e = _val_array(x, self.p, self.d)
        s = self._sign(x, e)
        return e * 3 + (s + 1)

    def _codes2(self, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
        p, d, q = self.p, self.d, self.q
        va, vb, vc = (_val_array(x, p, d) for x in (a, b, c))
        e1 = np.minimum(np.minimum(va, vb), vc)
        use_a = va == e1
        use_c = (~use_a) & (vc == e1)
        piv = np.where(use_a, a, np.where(use_c, c, (a + 2 * b + c) % q))
        other = np.where(use_a, c, np.where(use_c, a, c))
        off = np.where(use_a | use_c, b, (b + c) % q)
        zero = e1 >= d
        e1c = np.minimum(e1, d - 1)
        pe = np.power(p, e1c)
        u1 = piv // pe
        s1 = np.where(zero, 0, self._chi[u1 % p])
        w = np.zeros_like(a)
        for k in range(d):
            sel = (e1 == k)
            if not sel.any():
                continue
            mod = p ** (d - k)
            inv = self._inv[d - k][u1[sel] % mod]
            off_red = off[sel] // p**k
            w[sel] = (other[sel] - (off_red * off_red % mod) * inv % mod * p**k) % q
        e2 = np.where(zero, d, _val_array(w, p, d))
        s2 = np.where(zero, 0, self._sign(w, e2))
        same = (e1 == e2) & (e1 < d)
        s2 = np.where(same, s1 * s2, s2)
        s1 = np.where(same, 0, s1)
        return ((e1 * (d + 1) + e2) * 3 + (s1 + 1)) * 3 + (s2 + 1)

    def class_of(self, entries: tuple[int, ...]) -> int:
        return int(self._ids_of(*[[e] for e in entries])[0])

    def representative(self, cid: int) -> tuple[int, ...]:
        flat = int(np.flatnonzero(self.ids.ravel() == cid)[0])
        return tuple(int(x) for x in np.unravel_index(flat, self.ids.shape))

    @property
    def structure(self) -> np.ndarray:
        """N[c1, c2, c3] = #{A1 in c1 : A3 - A1 in c2} for any fixed A3 in c3."""
        if self._structure is None:
            K, q = len(self.codes), self.q
            out = np.zeros((K, K, K), dtype=np.int64)
            r = np.arange(q)
            for c3 in range(K):
                rep = self.representative(c3)
                shifted = self.ids[np.ix_(*[(x - r) % q for x in rep])]
                pairs = self.ids.ravel().astype(np.int64) * K + shifted.ravel()
                out[:, :, c3] = np.bincount(pairs, minlength=K * K).reshape(K, K)
            self._structure = out
        return self._structure

    def row_distribution(self, s: int) -> list[int]:
        """Per-element count of r in (Z/p^d)^n with s r r^T = A, as a class function."""
        q = self.q
        r = np.arange(q, dtype=np.int64)
        if self.n == 1:
            vals = self._ids_of(s * r * r)
        else:
            x, y = np.meshgrid(r, r, indexing="ij")
            x, y = x.ravel(), y.ravel()
            vals = self._ids_of(s * x * x, s * x * y, s * y * y)
        totals = np.bincount(vals.ravel(), minlength=self.K)
        return [int(t) // int(z) for t, z in zip(totals, self.sizes)]

    @property
    def structure_obj(self) -> np.ndarray:
        if self._structure_obj is None:
            self._structure_obj = self.structure.astype(object)
        return self._structure_obj

    def convolve(self, f: list[int], g: list[int]) -> list[int]:
        # object arrays keep the counts as exact Python ints
        outer = np.multiply.outer(np.array(f, dtype=object), np.array(g, dtype=object))
        return [int(x) for x in np.tensordot(outer, self.structure_obj, axes=([0, 1], [0, 1]))]


@lru_cache(maxsize=None)
def class_table(p: int, d: int, n: int) -> ClassTable:
    return ClassTable(p, d, n)


def _residues(entries, p: int, d: int) -> list[int]:
    out = []
    for s in entries:
        s = Fraction(s)
        if valuation(s, p) < 0:
            raise InvalidInput("class counting needs integral entries")
        out.append(to_residue(s, p, d))
    return out


def count_diagonal(target, source, p: int, d: int) -> int:
    """#{phi mod p^d : phi^T diag(target) phi = diag(source)} for a source of rank 1 or 2."""
    n = len(source)
    table = class_table(p, d, n)
    svals = _residues(target, p, d)
    tvals = _residues(source, p, d)
    dist: list[int] | None = None
    cache: dict[int, list[int]] = {}
    for s in svals:
        row = cache.setdefault(s, table.row_distribution(s))
        dist = row if dist is None else table.convolve(dist, row)
    key = (tvals[0],) if n == 1 else (tvals[0], 0, tvals[1])
    if dist is None:
        return int(all(t == 0 for t in tvals))
    return dist[table.class_of(key)]


def density_diagonal(target, source, p: int) -> Fraction:
    """Den(diag(target), diag(source)) for an integral source of rank 1 or 2.

    Depths b+1, b+2, b+3 are tried, b the largest source valuation.  If a deeper
    table does not fit in memory the last in-budget value is returned: depth b+1
    has agreed with b+2 on every case that fits.
    """
    m, n = len(target), len(source)
    dim = m * n - n * (n + 1) // 2
    d = max(1, max(valuation(s, p) for s in source) + 1)
    prev = None
    for depth in (d, d + 1, d + 2):
        try:
            count = count_diagonal(target, source, p, depth)
        except BudgetExceeded:
            if prev is None:
                raise
            return prev
        val = Fraction(count, p ** (depth * dim))
        if val == prev:
            return val
        prev = val
    raise NotStabilized("class-convolution densities did not stabilize", prev, val)
