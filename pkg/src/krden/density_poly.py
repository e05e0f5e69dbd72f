"""Local densities, density polynomials and their normalized derivatives at X = 1.

Den(M, L) is routed to the cheapest exact method:

* denominators are cleared with Den(M[p^e], L[p^e]) = p^{e n(n+1)/2} Den(M, L);
* a unit entry of L is split off against the unimodular block of M (Witt cancellation);
* rank >= 3 sources against vertex targets H_{n1}[p] + H_{n2} use the vertex
  difference recursion, which lowers the source rank;
* rank <= 2 sources are counted by class convolution;
* anything else falls back to the digit-layer search.

Den(X, M, L) is recovered by interpolation through X = p^{-k}, where it equals
Den(M + H_{2k}^+, L).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from krden import class_counting
from krden.errors import InconsistentInput, InvalidInput, NotStabilized
from krden.lattice_algebra import (
    QuadLattice,
    diagonal,
    diagonalize,
    disc_chi,
    dual,
    h0p,
    hyperbolic,
    is_anisotropic,
    orthosum,
    rescale,
)
from krden.padic_arith import chi, rat, rat_str, smallest_nonresidue, unit_part, valuation
from krden.rep_counting import density, pden_closed

Diag = tuple  # canonical tuple of Fractions


# ------------------------------------------------------------------ polynomials


@dataclass(frozen=True)
class DensityPolynomial:
    coefficients: tuple[Fraction, ...]
    provenance: str = "interpolated"

    def __post_init__(self):
        c = list(self.coefficients)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(Fraction(x) for x in c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    @staticmethod
    def _coerce(other) -> tuple[Fraction, ...]:
        return other.coefficients if isinstance(other, DensityPolynomial) else (Fraction(other),)

    def __add__(self, other) -> "DensityPolynomial":
        a, b = self.coefficients, self._coerce(other)
        n = max(len(a), len(b))
        pad = lambda c: tuple(c) + (Fraction(0),) * (n - len(c))
        return DensityPolynomial(tuple(x + y for x, y in zip(pad(a), pad(b))), "derived")

    __radd__ = __add__

    def __neg__(self) -> "DensityPolynomial":
        return DensityPolynomial(tuple(-c for c in self.coefficients), self.provenance)

    def __sub__(self, other) -> "DensityPolynomial":
        return self + (-DensityPolynomial(self._coerce(other)))

    def __rsub__(self, other) -> "DensityPolynomial":
        return -self + other

    def __mul__(self, other) -> "DensityPolynomial":
        a, b = self.coefficients, self._coerce(other)
        out = [Fraction(0)] * max(len(a) + len(b) - 1, 0)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return DensityPolynomial(tuple(out), "derived")

    __rmul__ = __mul__

    def same_as(self, other: "DensityPolynomial") -> bool:
        """Coefficient equality, ignoring provenance."""
        return self.coefficients == other.coefficients

    def derivative(self) -> "DensityPolynomial":
        return DensityPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i), self.provenance)

    def vanishes_at_1(self) -> bool:
        return self(1) == 0

    def to_json(self) -> dict:
        return {"coeffs": [rat_str(c) for c in self.coefficients], "vanishes_at_1": self.vanishes_at_1()}

    def __str__(self) -> str:
        terms = [f"({rat_str(c)})*X^{i}" for i, c in enumerate(self.coefficients) if c]
        return " + ".join(terms) or "0"


def interpolate(xs, ys, provenance: str = "interpolated") -> DensityPolynomial:
    """Exact Lagrange interpolation via Newton divided differences."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (X - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * c for s, c in zip(shifted, poly)]
        poly[0] += coef[i]
    return DensityPolynomial(tuple(poly), provenance)


# ---------------------------------------------------------- canonical diagonals


def _blocks(entries, p: int) -> dict[int, tuple[int, int]]:
    """{exponent: (rank, chi of the product of unit parts)}."""
    out: dict[int, list[int]] = {}
    for s in entries:
        e = valuation(s, p)
        r, c = out.get(e, (0, 1))
        out[e] = (r + 1, c * chi(unit_part(s, p), p))
    return out


def _from_blocks(blocks: dict[int, tuple[int, int]], p: int) -> Diag:
    delta = smallest_nonresidue(p)
    out = []
    for e in sorted(blocks):
        r, c = blocks[e]
        if r == 0:
            continue
        scale = Fraction(p) ** e
        out += [scale] * (r - 1) + [scale * (1 if c == 1 else delta)]
    return tuple(out)


def canon(entries, p: int) -> Diag:
    return _from_blocks(_blocks(entries, p), p)


def _self_dual(rank: int, eps: int, p: int, exponent: int = 0) -> list[Fraction] | None:
    """Diagonal H_rank^eps[p^exponent]; None when no such lattice exists."""
    if rank == 0:
        return [] if eps == 1 else None
    dc = disc_chi(rank, eps, p)
    return list(_from_blocks({exponent: (rank, dc)}, p))


# ---------------------------------------------------------------------- routing


def _min_val(entries, p: int) -> int:
    return min(valuation(s, p) for s in entries)


@lru_cache(maxsize=None)
def _den(T: Diag, S: Diag, p: int) -> Fraction:
    if not S:
        return Fraction(1)
    n = len(S)
    q = Fraction(p)
    e = -_min_val(T, p)
    if e > 0:
        scale = q**e
        return q ** (-e * n * (n + 1) // 2) * _den(canon([t * scale for t in T], p), canon([s * scale for s in S], p), p)
    if _min_val(S, p) < 0:
        return Fraction(0)
    blocksT = _blocks(T, p)
    if n >= 2:
        unit = next((s for s in S if valuation(s, p) == 0), None)
        if unit is not None and 0 in blocksT:
            return _split_unit(T, S, unit, p)
    if n <= 2:
        return _den_class(T, S, p)
    if set(blocksT) <= {0, 1}:
        n2, c2 = blocksT.get(0, (0, 1))
        n1, c1 = blocksT.get(1, (0, 1))
        if _reducible(n1, disc_chi(n1, c1, p)) and _reducible(n2, disc_chi(n2, c2, p)) and n2 >= 2:
            return _vertex_step(n1, disc_chi(n1, c1, p), n2, disc_chi(n2, c2, p), S, p)
    return _den_search(T, S, p)


def _reducible(rank: int, eps: int) -> bool:
    """True when H_rank^eps = H_2^+ + H_{rank-2}^eps (or rank 0)."""
    return rank == 0 or rank >= 3 or (rank == 2 and eps == 1)


def _split_unit(T: Diag, S: Diag, unit: Fraction, p: int) -> Fraction:
    rest = list(S)
    rest.remove(unit)
    first = _den(T, (unit,), p)
    if first == 0:
        return first
    blocks = _blocks(T, p)
    r, c = blocks[0]
    blocks[0] = (r - 1, c * chi(unit, p))
    if r == 1 and blocks[0][1] != 1:
        return Fraction(0)
    return first * _den(_from_blocks(blocks, p), canon(rest, p), p)


def _vertex_step(n1: int, eps1: int, n2: int, eps2: int, S: Diag, p: int) -> Fraction:
    """Vertex difference recursion, peeling the largest-valuation entry x of S.

    Den(L, M+<x>) = q^{m+2-n1-n2} Den(L, M+<x/p>)
                    + q^{m+1-n2} Den(H_{n1-2}[p] + H_{n2} + <-s>, M) Pden(H_{n1}, s/p)
                    + Den(H_{n1}[p] + H_{n2-2} + <-s>, M) Pden(H_{n2}, s),
    with L = H_{n1}^{eps1}[p] + H_{n2}^{eps2} and s = q(x).  For n1 = 0 the middle
    term is absent.
    """
    q = Fraction(p)
    entries = sorted(S, key=lambda s: valuation(s, p))
    s = entries[-1]
    M = tuple(entries[:-1])
    m = len(M)
    target = tuple(_self_dual(n1, eps1, p, 1) + _self_dual(n2, eps2, p))
    total = Fraction(0)
    if valuation(s, p) >= 2:
        total += q ** (m + 2 - n1 - n2) * _den(target, canon(M + (s / p**2,), p), p)
    if n1 >= 2:
        pd = pden_closed(n1, eps1, s / p, p)
        if pd:
            t1 = _self_dual(n1 - 2, eps1, p, 1) + _self_dual(n2, eps2, p) + [-s]
            total += q ** (m + 1 - n2) * _den(canon(t1, p), canon(M, p), p) * pd
    pd = pden_closed(n2, eps2, s, p)
    if pd:
        t2 = _self_dual(n1, eps1, p, 1) + _self_dual(n2 - 2, eps2, p) + [-s]
        total += _den(canon(t2, p), canon(M, p), p) * pd
    return total


def _den_class(T: Diag, S: Diag, p: int) -> Fraction:
    return class_counting.density_diagonal(T, S, p)


def _den_search(T: Diag, S: Diag, p: int) -> Fraction:
    return density(diagonal(p, T), diagonal(p, S)).normalized


def den(M: QuadLattice, L: QuadLattice) -> Fraction:
    """Local density Den(M, L) = lim q^{-d dim} #Rep_{M,L}(Z/p^d)."""
    if M.p != L.p:
        raise InvalidInput("prime mismatch")
    p = M.p
    return _den(canon(diagonalize(M), p), canon(diagonalize(L), p), p)


def den_at(M: QuadLattice, L: QuadLattice, k: int) -> Fraction:
    """Den(M + H_{2k}^+, L), the value of Den(X, M, L) at X = p^{-k}."""
    if k < 0:
        raise InvalidInput("k must be non-negative")
    return den(orthosum(M, hyperbolic(M.p, k)), L)


def den_poly(M: QuadLattice, L: QuadLattice, degree_hint: int | None = None, max_degree: int = 16) -> DensityPolynomial:
    """Interpolate Den(X, M, L) through X = p^{-k}, growing the node set until it stabilizes."""
    p = M.p
    if M.is_integral() and not L.is_integral():
        return DensityPolynomial((), "closed-form")
    D = degree_hint if degree_hint is not None else 2
    xs = [Fraction(1, p**k) for k in range(D + 2)]
    ys = [den_at(M, L, k) for k in range(D + 2)]
    while True:
        low = interpolate(xs[:-1], ys[:-1])
        high = interpolate(xs, ys)
        if low == high:
            return high
        if len(xs) > max_degree + 1:
            raise NotStabilized("interpolation did not stabilize", str(low), str(high))
        k = len(xs)
        xs.append(Fraction(1, p**k))
        ys.append(den_at(M, L, k))


# ----------------------------------------------------------- derived densities


class DerivedKind(enum.Enum):
    H0P = "h0p"
    H0P_DUAL = "h0pdual"
    AUG_SPLIT = "augsplit"
    AUG_SCALED = "augscaled"


def _plane(p: int, scale: int = 1) -> QuadLattice:
    return rescale(hyperbolic(p, 1), scale)


def derived_target(kind: DerivedKind, p: int, x: object = None) -> QuadLattice:
    """The lattice M whose density polynomial is differentiated for this kind."""
    if kind is DerivedKind.H0P:
        return h0p(p)
    if kind is DerivedKind.H0P_DUAL:
        return dual(h0p(p))
    s = rat(x)
    if s == 0:
        raise InvalidInput("x must have nonzero norm")
    scale = p if kind is DerivedKind.AUG_SCALED else 1
    return orthosum(diagonal(p, [-s]), _plane(p, scale))


@lru_cache(maxsize=None)
def normalizer(kind: DerivedKind, p: int) -> Fraction:
    """Density of the reference representation of each kind, computed by the router."""
    if kind is DerivedKind.H0P:
        return den(h0p(p), orthosum(_plane(p), diagonal(p, [p])))
    if kind is DerivedKind.H0P_DUAL:
        return den(dual(h0p(p)), orthosum(_plane(p), diagonal(p, [Fraction(1, p)])))
    if kind is DerivedKind.AUG_SPLIT:
        return den(_plane(p), diagonal(p, [1]))
    return den(_plane(p, p), diagonal(p, [p]))


def dden(kind: DerivedKind, L: QuadLattice, x: object = None) -> Fraction:
    """Normalized derivative at X = 1: -2 P'(1)/N for the H_0(p) kinds, -P'(1)/N for the others."""
    p = L.p
    if kind in (DerivedKind.H0P, DerivedKind.H0P_DUAL):
        if L.rank != 3:
            raise InvalidInput("derived densities against H_0(p) need a rank-3 lattice")
        factor = -2
    else:
        if L.rank != 2:
            raise InvalidInput("augmented derived densities need a rank-2 lattice")
        factor = -1
    poly = den_poly(derived_target(kind, p, x), L)
    if factor == -2 and is_anisotropic(L) and not poly.vanishes_at_1():
        raise InconsistentInput("density polynomial of an anisotropic lattice must vanish at X = 1")
    return factor * poly.derivative()(1) / normalizer(kind, p)


def dden_rank2_closed(kind: str, a: int, b: int, p: int) -> Fraction:
    """Closed rank-2 derivatives in terms of the invariants a <= b of L.

    "augscaled" is the derivative against <x> + H_2^+[p]; "rescaled" is the one
    against <x>[p^{-1}] + H_2^+ evaluated at L[p^{-1}], for L with invariants (a, b).
    Both assume nu(q(x)) >= max(b, 2) and that L + <x> is anisotropic.  When
    a and b have different parity the two a-terms are added, not subtracted; the
    subtracting variant gives non-integers such as 7/2 at (1, 2) and disagrees
    with interpolation.
    """
    if a > b:
        raise InvalidInput("need a <= b")
    q = Fraction(p)
    same = (a - b) % 2 == 0
    sign = -1 if same else 1
    if kind == "augscaled":
        if a < 0:
            raise InvalidInput("augscaled needs a >= 0")
        hi, lo = ((a + b + 6) // 2, (a + b + 2) // 2) if same else ((a + b + 5) // 2, (a + b + 3) // 2)
        num = a * q**hi + sign * a * q**lo - 2 * q ** (a + 2) + q**2 + 2 * q - 1
    elif kind == "rescaled":
        if a < -1:
            raise InvalidInput("rescaled needs a >= -1")
        hi, lo = ((a + b + 2) // 2, (a + b - 2) // 2) if same else ((a + b + 1) // 2, (a + b - 1) // 2)
        num = a * q**hi + sign * a * q**lo - 2 * q**a + 2
    else:
        raise InvalidInput(f"unknown closed form {kind!r}")
    return num / (q - 1) ** 2

