"""Global bookkeeping for ternary T: enumeration, the set Diff(T) and local Whittaker factors.

Only the nonarchimedean pieces are computed.  The archimedean derivative, the
factor at 2 and the volume constants stay symbolic in LocalTerm.factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from krden import density_poly as dp
from krden import kr_engine
from krden.errors import InvalidInput
from krden.lattice_algebra import QuadLattice, h0p, hyperbolic, dual, make
from krden.padic_arith import hilbert, rat, rat_str, valuation

TMatrix = tuple[tuple[Fraction, ...], ...]


def _det3(t: TMatrix) -> Fraction:
    (a, b, c), (d, e, f), (g, h, i) = t
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def parse_t(text: str) -> TMatrix:
    """Nine entries row by row, or six as t11,t12,t13,t22,t23,t33."""
    vals = [rat(s.strip()) for s in text.replace(";", ",").split(",") if s.strip()]
    if len(vals) == 6:
        t11, t12, t13, t22, t23, t33 = vals
        vals = [t11, t12, t13, t12, t22, t23, t13, t23, t33]
    if len(vals) != 9:
        raise InvalidInput("T needs 6 or 9 entries")
    t = tuple(tuple(vals[3 * i : 3 * i + 3]) for i in range(3))
    if any(t[i][j] != t[j][i] for i in range(3) for j in range(3)):
        raise InvalidInput("T must be symmetric")
    return t


def enumerate_t(m1: int, m2: int, m3: int) -> list[TMatrix]:
    """Positive-definite half-integral T with diagonal (m1, m2, m3), ordered by (2t12, 2t13, 2t23)."""
    if min(m1, m2, m3) < 1:
        raise InvalidInput("diagonal entries must be positive")
    m = (m1, m2, m3)

    def offs(i: int, j: int) -> range:
        # 2 t_ij = k with k^2 < 4 m_i m_j keeps the 2x2 minor positive
        r = math.isqrt(4 * m[i] * m[j] - 1)
        return range(-r, r + 1)

    out = []
    for k12 in offs(0, 1):
        for k13 in offs(0, 2):
            for k23 in offs(1, 2):
                t12, t13, t23 = Fraction(k12, 2), Fraction(k13, 2), Fraction(k23, 2)
                t = ((Fraction(m1), t12, t13), (t12, Fraction(m2), t23), (t13, t23, Fraction(m3)))
                if _det3(t) > 0:
                    out.append(t)
    return out


def _diagonalize_q(t: TMatrix) -> list[Fraction]:
    """An orthogonal basis over Q (no integrality is preserved)."""
    g = [list(r) for r in t]
    out = []
    while g:
        n = len(g)
        i = next((k for k in range(n) if g[k][k] != 0), None)
        if i is None:
            j = next((k for k in range(1, n) if g[0][k] != 0), None)
            if j is None:
                raise InvalidInput("T is singular")
            # x_0 <- x_0 + x_j has q = 2 g_0j != 0 when both diagonals vanish
            g[0] = [a + b for a, b in zip(g[0], g[j])]
            for r in range(n):
                g[r][0] += g[r][j]
            i = 0
        piv = g[i][i]
        for k in range(n):
            if k != i and g[k][i]:
                f = g[k][i] / piv
                g[k] = [a - f * b for a, b in zip(g[k], g[i])]
                for r in range(n):
                    g[r][k] -= f * g[r][i]
        out.append(piv)
        g = [[g[r][c] for c in range(n) if c != i] for r in range(n) if r != i]
    return out


def is_isotropic_at(t: TMatrix, v: int) -> bool:
    """<a, b, c> is isotropic over Q_v iff (-ac, -bc)_v = 1."""
    a, b, c = _diagonalize_q(t)
    return hilbert(-a * c, -b * c, v) == 1


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def diff_set(t: TMatrix) -> frozenset[int]:
    """Finite primes v where T is not represented by (M_2(Q_v), det).

    A ternary space embeds in the split quaternary space exactly when it is
    isotropic, and only primes dividing 2 det(2T) can be anisotropic.
    """
    d = _det3(t)
    if d == 0:
        raise InvalidInput("T is singular")
    d2 = 8 * d
    n = abs(d2.numerator * d2.denominator)
    return frozenset(v for v in _prime_factors(2 * n) if not is_isotropic_at(t, v))


# ------------------------------------------------------------ local factors


def local_lattice(t: TMatrix, p: int) -> QuadLattice:
    return make(p, t)


def standard_lattice(p: int, name: str = "selfdual") -> QuadLattice:
    """M_2(Z_p) with the determinant form, H_0(p), or H_0(p)^dual."""
    if name == "selfdual":
        return hyperbolic(p, 2)
    if name == "h0p":
        return h0p(p)
    if name == "h0pdual":
        return dual(h0p(p))
    raise InvalidInput(f"unknown lattice {name!r}")


def det_factor(lam: QuadLattice) -> Fraction:
    """|det S|^{3/2} for the half-Gram S of lam; needs an even valuation."""
    e = valuation(lam.det, lam.p)
    if e % 2:
        raise InvalidInput("|det S|^{3/2} is irrational for odd valuation")
    return Fraction(lam.p) ** (-3 * e // 2)


def whittaker_factor(t: TMatrix, v: int, k: int, lam: QuadLattice | None = None) -> Fraction:
    """|det S|_v^{3/2} Den(lam + H_{2k}^+, L_T), lam defaulting to M_2(Z_v)."""
    if v == 2:
        raise InvalidInput("v must be odd")
    lam = lam if lam is not None else standard_lattice(v)
    return det_factor(lam) * dp.den_at(lam, local_lattice(t, v), k)


@dataclass(frozen=True)
class LocalTerm:
    value: Fraction
    kind: str
    p: int
    factors: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": rat_str(self.value), "kind": self.kind, "p": self.p, "factors": dict(self.factors)}


def kr_local_term(t: TMatrix, p: int, kind: str = "Z") -> LocalTerm:
    """The p-part of the intersection number for T with Diff(T) = {p}.

    Kind Z gives Int^Z(L_T) = dDen(H_0(p), L_T); kind Y gives Int^Y(L_T) + 1.
    The constant relating it to W'_{T,p} is carried in `factors`.
    """
    if diff_set(t) != {p}:
        raise InvalidInput(f"Diff(T) is not {{{p}}}")
    lat = local_lattice(t, p)
    if kind == "Z":
        value = kr_engine.int_z(lat)
    elif kind == "Y":
        value = kr_engine.int_y(lat) + 1
    else:
        raise InvalidInput("kind must be Z or Y")
    factors = {"W'_{T,p}": f"{p}^4 ({p}-1)^-2 log({p})^-1 times value", "archimedean": "not computed", "v=2": "not computed"}
    return LocalTerm(value, kind, p, factors)
