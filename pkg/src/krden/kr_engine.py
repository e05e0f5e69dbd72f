"""Derived densities of anisotropic ternary lattices by induction on the largest invariant.

Each step replaces the largest-valuation diagonal entry x by x/p^2 and adds the
difference term.  For H_0(p) the term is 2 dDen(<x>[-1] + H_2^+[p], L') +
2 dDen(<x>[-1] + H_2^+, L'), where L' is the complement of x; for the self-dual
H it is the second summand alone.  The recursion stops at lattices whose
largest invariant is at most 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from krden import density_poly as dp
from krden.density_poly import DerivedKind
from krden.errors import InvalidInput
from krden.lattice_algebra import (
    QuadLattice,
    diagonal,
    diagonalize,
    fundamental_invariants,
    heps,
    hyperbolic,
    is_anisotropic,
    orthosum,
    rescale,
)
from krden.padic_arith import rat_str, valuation

H0P_BASE = {(0, 0, 1): Fraction(-1), (0, 1, 1): Fraction(0)}


@dataclass(frozen=True)
class Step:
    invariants: tuple[int, ...]
    branch: str
    aug_scaled: Fraction | None
    aug_split: Fraction
    delta: Fraction

    def to_json(self) -> dict:
        out = {"invariants": list(self.invariants), "branch": self.branch, "aug_split": rat_str(self.aug_split)}
        if self.aug_scaled is not None:
            out["aug_scaled"] = rat_str(self.aug_scaled)
        out["delta"] = rat_str(self.delta)
        return out


@dataclass(frozen=True)
class KRResult:
    value: Fraction
    route: str
    trace: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {"value": rat_str(self.value), "route": self.route, "trace": [s.to_json() for s in self.trace]}


def _sorted_entries(L: QuadLattice) -> list[Fraction]:
    return sorted(diagonalize(L), key=lambda s: valuation(s, L.p))


def _invariants(entries, p: int) -> tuple[int, ...]:
    return tuple(sorted(valuation(s, p) for s in entries))


def _check_ternary(L: QuadLattice) -> None:
    if L.rank != 3:
        raise InvalidInput("expected a rank-3 lattice")
    if not is_anisotropic(L):
        raise InvalidInput("lattice is isotropic")


def _branch(n: int) -> str:
    return "n=0" if n == 0 else "n=1" if n == 1 else "n>=2"


def _aug_values(flat: list[Fraction], x: Fraction, p: int, closed: bool, scaled: bool):
    """(dDen(<x>[-1] + H_2^+[p], flat), dDen(<x>[-1] + H_2^+, flat))."""
    a, b = _invariants(flat, p)
    if closed:
        split = dp.dden_rank2_closed("rescaled", a + 1, b + 1, p)
        sc = dp.dden_rank2_closed("augscaled", a, b, p) if scaled else None
        return sc, split
    lat = diagonal(p, flat)
    split = dp.dden(DerivedKind.AUG_SPLIT, lat, x)
    sc = dp.dden(DerivedKind.AUG_SCALED, lat, x) if scaled else None
    return sc, split


def _recurse(entries: list[Fraction], p: int, closed: bool, scaled: bool) -> tuple[list[Fraction], list[Step]]:
    steps = []
    while valuation(entries[-1], p) >= 2:
        flat, x = entries[:2], entries[2]
        n = valuation(x, p)
        sc, split = _aug_values(flat, x, p, closed, scaled)
        delta = 2 * sc + 2 * split if scaled else split
        steps.append(Step(_invariants(entries, p), _branch(n), sc, split, delta))
        entries = sorted(flat + [x / p**2], key=lambda s: valuation(s, p))
    return entries, steps


def dden_h0p(L: QuadLattice, *, route: str = "recursion") -> KRResult:
    """dDen(H_0(p), L) for an integral anisotropic ternary L."""
    _check_ternary(L)
    if not L.is_integral():
        raise InvalidInput("lattice is not integral")
    p = L.p
    if route == "interpolation":
        return KRResult(dp.dden(DerivedKind.H0P, L), "interpolation")
    entries, steps = _recurse(_sorted_entries(L), p, route == "recursion", True)
    base = _invariants(entries, p)
    if base not in H0P_BASE:
        raise AssertionError(f"unexpected terminal invariants {base} for an anisotropic lattice")
    value = H0P_BASE[base] + sum((s.delta for s in steps), Fraction(0))
    return KRResult(value, "base-case" if not steps else route, tuple(steps))


def dden_h0p_dual(L: QuadLattice, *, route: str = "recursion") -> KRResult:
    """dDen(H_0(p)^dual, L) for anisotropic ternary L with L[p] integral.

    The difference steps agree with those of H_0(p) on L[p], and the two base
    values are shifted by one, so the whole recursion equals dDen(H_0(p), L[p]) + 1.
    """
    _check_ternary(L)
    p = L.p
    scaled = rescale(L, p)
    if not scaled.is_integral():
        raise InvalidInput("L[p] is not integral")
    if route == "interpolation":
        return KRResult(dp.dden(DerivedKind.H0P_DUAL, L), "interpolation")
    inner = dden_h0p(scaled, route=route)
    return KRResult(inner.value + 1, inner.route, inner.trace)


def int_z(L: QuadLattice) -> Fraction:
    if L.rank != 3:
        raise InvalidInput("expected a rank-3 lattice")
    if not L.is_integral() or not is_anisotropic(L):
        return Fraction(0)
    return dden_h0p(L).value


def int_y(L: QuadLattice) -> Fraction:
    return dden_h0p_dual(L).value - 1


def int_cm(M: QuadLattice) -> Fraction:
    """Intersection number of a rank-2 lattice with the CM cycle, via <1> + M against H_0(p)."""
    if M.rank != 2:
        raise InvalidInput("expected a rank-2 lattice")
    if not is_anisotropic(M):
        raise InvalidInput("lattice is isotropic")
    return dden_h0p(orthosum(diagonal(M.p, [1]), M)).value


# ------------------------------------------------------------- hyperspecial


def _h4(p: int) -> QuadLattice:
    return heps(p, 4, 1)


def hyperspecial_normalizer(p: int) -> Fraction:
    return dp.den(_h4(p), orthosum(hyperbolic(p, 1), diagonal(p, [1])))


def dden_hyperspecial_interpolated(L: QuadLattice) -> Fraction:
    poly = dp.den_poly(_h4(L.p), L)
    return -poly.derivative()(1) / hyperspecial_normalizer(L.p)


def dden_hyperspecial(L: QuadLattice, *, route: str = "recursion") -> KRResult:
    """dDen(H, L) for the self-dual rank-4 H; bases with largest invariant <= 1 are interpolated."""
    _check_ternary(L)
    if not L.is_integral():
        return KRResult(Fraction(0), "base-case")
    p = L.p
    if route == "interpolation":
        return KRResult(dden_hyperspecial_interpolated(L), "interpolation")
    entries, steps = _recurse(_sorted_entries(L), p, route == "recursion", False)
    value = dden_hyperspecial_interpolated(diagonal(p, entries)) + sum((s.delta for s in steps), Fraction(0))
    return KRResult(value, "base-case" if not steps else route, tuple(steps))


def invariants_of(L: QuadLattice) -> tuple[int, ...]:
    return tuple(fundamental_invariants(L))
