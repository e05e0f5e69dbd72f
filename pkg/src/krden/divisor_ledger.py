"""Integer bookkeeping for the exceptional divisor of the blown-up Gamma_0(p) model.

The exceptional divisor is P^1 x P^1, so restrictions of divisors to it live in
Pic = Z^2 with O(m1, n1) . O(m2, n2) = m1 n2 + m2 n1.  The special divisor Z(x)
with nu(q(x)) = n splits as (n + 1) Exc + sum_i Dtilde(p^{-i} x), and each
difference divisor Dtilde decomposes into Hecke strata.  The intersection numbers
that need densities are taken from density_poly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from krden import density_poly as dp
from krden.errors import InvalidInput


@dataclass(frozen=True)
class PicClass:
    m: int
    n: int

    def __add__(self, other: "PicClass") -> "PicClass":
        return PicClass(self.m + other.m, self.n + other.n)

    def __rmul__(self, k: int) -> "PicClass":
        return PicClass(k * self.m, k * self.n)

    def __neg__(self) -> "PicClass":
        return PicClass(-self.m, -self.n)

    def __str__(self) -> str:
        return f"O({self.m},{self.n})"

    def to_json(self) -> list[int]:
        return [self.m, self.n]


ZERO = PicClass(0, 0)


def pic_intersect(c1: PicClass, c2: PicClass) -> int:
    return c1.m * c2.n + c2.m * c1.n


def exc_selfclass() -> PicClass:
    """Restriction of Exc to itself."""
    return PicClass(-1, -1)


def exc_multiplicity(n: int, p: int) -> Fraction:
    """Multiplicity of the exceptional divisor in the pullback of Z(x), nu(q(x)) = n."""
    if n <= 0:
        raise InvalidInput("n must be positive")
    base = Fraction(p) ** (n // 2)
    return base * (1 + Fraction(1, p)) if n % 2 == 0 else 2 * base


def restriction_class(v: int) -> PicClass:
    """Class of Exc meet Dtilde(y) for nu(q(y)) = v."""
    if v < 0:
        raise InvalidInput("valuation must be non-negative")
    return PicClass(1, 0) if v == 0 else PicClass(2, 1) if v == 1 else PicClass(2, 2)


def strata(v: int) -> tuple[str, ...]:
    """Hecke strata making up Dtilde(y) for nu(q(y)) = v."""
    if v < 0:
        raise InvalidInput("valuation must be non-negative")
    return ("I+", "I-", "II+", "II-")[: 1 if v == 0 else 3 if v == 1 else 4]


@dataclass(frozen=True)
class DivisorLedger:
    """Formal integer combination of named divisors."""

    terms: tuple[tuple[str, int], ...]
    restrictions: dict = field(default_factory=dict, compare=False)
    components: dict = field(default_factory=dict, compare=False)

    def coefficient(self, name: str) -> int:
        return dict(self.terms).get(name, 0)

    def restriction_to_exc(self) -> PicClass:
        total = ZERO
        for name, k in self.terms:
            cls = exc_selfclass() if name == "Exc" else self.restrictions[name]
            total = total + k * cls
        return total

    def to_json(self) -> dict:
        return {
            "terms": {name: k for name, k in self.terms},
            "restrictions": {name: c.to_json() for name, c in self.restrictions.items()},
            "strata": {name: list(s) for name, s in self.components.items()},
            "restriction_to_exc": self.restriction_to_exc().to_json(),
        }


def decompose_special(n: int) -> DivisorLedger:
    """Z(x) = (n+1) Exc + sum_{i <= n/2} Dtilde(p^{-i} x) for nu(q(x)) = n."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    terms = [("Exc", n + 1)]
    restrictions, components = {}, {}
    for i in range(n // 2 + 1):
        name = f"Dtilde({i})"
        terms.append((name, 1))
        restrictions[name] = restriction_class(n - 2 * i)
        components[name] = strata(n - 2 * i)
    return DivisorLedger(tuple(terms), restrictions, components)


# ------------------------------------------------- geometric difference formula


@dataclass(frozen=True)
class GeometricDifference:
    ff: Fraction
    vv: Fraction
    fv: Fraction
    vf: Fraction

    @property
    def total(self) -> Fraction:
        return self.ff + self.vv + self.fv + self.vf

    def to_json(self) -> dict:
        from krden.padic_arith import rat_str

        return {k: rat_str(getattr(self, k)) for k in ("ff", "vv", "fv", "vf")} | {"sum": rat_str(self.total)}


def geometric_difference(a: int, b: int, n: int, p: int) -> GeometricDifference:
    """The four strata contributions to Int(L + <x>) - Int(L + <x/p>).

    (a, b) are the invariants of L and n = nu(q(x)) >= max(b, 2).  The FF and VV
    strata contribute dDen(<x>[-1] + H_2^+, L); FV and VF contribute
    dDen(<x>[-1] + H_2^+[p], L).
    """
    if not 0 <= a <= b:
        raise InvalidInput("need 0 <= a <= b")
    if n < max(b, 2):
        raise InvalidInput("need nu(q(x)) >= max(b, 2)")
    split = dp.dden_rank2_closed("rescaled", a + 1, b + 1, p)
    scaled = dp.dden_rank2_closed("augscaled", a, b, p)
    return GeometricDifference(split, split, scaled, scaled)


# ---------------------------------------------------------------- base cases


def blowup_pairing(lhs: dict[str, int], rhs: dict[str, int], table: dict[frozenset, Fraction]) -> Fraction:
    """Bilinear pairing of formal divisor sums on a surface given pairwise numbers."""
    total = Fraction(0)
    for x, i in lhs.items():
        for y, j in rhs.items():
            total += i * j * table[frozenset((x, y))]
    return total


def base_intersection(gk: tuple[int, int, int], p: int) -> Fraction:
    """Int^Z at GK (0,0,1) and (0,1,1) from intersections on the blow-up of N_0(z).

    Exc is a (-1)-curve meeting each strict transform once and each pullback
    zero times.  The pairing of the two pulled-back curves in case (0,1,1) is the
    hyperspecial intersection at GK (0,0,1), taken from the density engine.
    """
    table = {
        frozenset(("Exc",)): Fraction(-1),
        frozenset(("Exc", "C~")): Fraction(1),
        frozenset(("Exc", "pi*C1")): Fraction(0),
        frozenset(("Exc", "pi*C2")): Fraction(0),
    }
    if tuple(gk) == (0, 0, 1):
        return blowup_pairing({"Exc": 1}, {"Exc": 2, "C~": 1}, table)
    if tuple(gk) == (0, 1, 1):
        from krden import kr_engine
        from krden.lattice_algebra import diagonal, heps, orthosum

        lat = orthosum(heps(p, 2, -1), diagonal(p, [p]))
        table[frozenset(("pi*C1", "pi*C2"))] = kr_engine.dden_hyperspecial(lat).value
        return blowup_pairing({"Exc": 1, "pi*C1": 1}, {"Exc": 1, "pi*C2": 1}, table)
    raise InvalidInput("base intersections exist for GK (0,0,1) and (0,1,1)")
