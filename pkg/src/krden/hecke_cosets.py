"""Gamma_0(p) double cosets in GL_2(Q_p).

Every double coset contains exactly one of diag(p^a, p^b) or (0, p^a; p^b, 0).
The reduction works with the weights

    w(a) = 2 v(a),   w(b) = 2 v(b) + 1,   w(c) = 2 v(c) - 1,   w(d) = 2 v(d)

for x = (a b; c d).  The allowed moves are the row operations R1 += t R2 and
R2 += pt R1, the column operations C2 += t C1 and C1 += pt C2 (t in Z_p), and
unit scalings.  An entry of minimal weight can clear its row and column with
these moves, so a single pivot step lands on a representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from krden.errors import InvalidInput
from krden.padic_arith import INFINITY, rat, unit_part, valuation


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def of(cls, a, b, c, d) -> "Mat2":
        return cls(rat(a), rat(b), rat(c), rat(d))

    @classmethod
    def parse(cls, text: str) -> "Mat2":
        parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
        if len(parts) != 4:
            raise InvalidInput("a 2x2 matrix needs four entries a,b,c,d")
        return cls.of(*(s.strip() for s in parts))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def entries(self) -> tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d)

    def in_h0(self, p: int) -> bool:
        """Integral with p dividing the lower-left entry."""
        return all(valuation(e, p) >= 0 for e in (self.a, self.b, self.d)) and valuation(self.c, p) >= 1

    def in_gamma0(self, p: int) -> bool:
        return self.in_h0(p) and self.det != 0 and valuation(self.det, p) == 0


IDENTITY = Mat2.of(1, 0, 0, 1)


class CosetType(Enum):
    I_PLUS = "I+"
    I_MINUS = "I-"
    II_PLUS = "II+"
    II_MINUS = "II-"


@dataclass(frozen=True)
class CosetClass:
    type: CosetType
    a: int
    b: int

    def representative(self, p: int) -> Mat2:
        x, y = Fraction(p) ** self.a, Fraction(p) ** self.b
        if self.type in (CosetType.I_PLUS, CosetType.I_MINUS):
            return Mat2(x, Fraction(0), Fraction(0), y)
        return Mat2(Fraction(0), x, y, Fraction(0))

    def __str__(self) -> str:
        return f"{self.type.value}({self.a},{self.b})"

    def to_json(self) -> dict:
        return {"type": self.type.value, "a": self.a, "b": self.b}


def coset_class(diagonal: bool, a: int, b: int) -> CosetClass:
    if diagonal:
        return CosetClass(CosetType.I_PLUS if a <= b else CosetType.I_MINUS, a, b)
    return CosetClass(CosetType.II_PLUS if a < b else CosetType.II_MINUS, a, b)


def is_primitive(x: Mat2, p: int) -> bool:
    """x lies in H_0(p) but not in p H_0(p)."""
    if not x.in_h0(p):
        raise InvalidInput("matrix is not in H_0(p)")
    return not (
        valuation(x.a, p) >= 1 and valuation(x.b, p) >= 1 and valuation(x.c, p) >= 2 and valuation(x.d, p) >= 1
    )


def _weights(x: Mat2, p: int) -> list[float]:
    shifts = (0, 1, -1, 0)
    return [INFINITY if e == 0 else 2 * valuation(e, p) + s for e, s in zip(x.entries(), shifts)]


def reduce(x: Mat2, p: int) -> tuple[Mat2, CosetClass, Mat2]:
    """(g, cls, h) with g, h in Gamma_0(p) and g x h = cls.representative(p)."""
    if x.det == 0:
        raise InvalidInput("matrix is singular")
    w = _weights(x, p)
    pivot = w.index(min(w))
    a, b, c, d = x.entries()
    if pivot == 0:
        g = Mat2.of(1, 0, -c / a, 1)
        h = Mat2.of(1, -b / a, 0, 1)
    elif pivot == 3:
        g = Mat2.of(1, -b / d, 0, 1)
        h = Mat2.of(1, 0, -c / d, 1)
    elif pivot == 1:
        h = Mat2.of(1, 0, -a / b, 1)
        y = x @ h
        g = Mat2.of(1, 0, -y.d / y.b, 1)
    else:
        g = Mat2.of(1, -a / c, 0, 1)
        y = g @ x
        h = Mat2.of(1, -y.d / y.c, 0, 1)
    y = g @ x @ h
    diagonal = pivot in (0, 3)
    u, v = (y.a, y.d) if diagonal else (y.b, y.c)
    cls = coset_class(diagonal, valuation(u, p), valuation(v, p))
    # unit scalings bring the surviving entries to powers of p
    g = Mat2.of(1 / unit_part(u, p), 0, 0, 1 / unit_part(v, p)) @ g
    return g, cls, h


def classify(x: Mat2, p: int) -> CosetClass:
    return reduce(x, p)[1]


def class_count(n: int) -> int:
    """Number of double cosets containing primitive x in H_0(p) with v(det x) = n."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    return 1 if n == 0 else 3 if n == 1 else 4


def primitive_representatives(n: int, p: int) -> list[Mat2]:
    """diag(1, p^n), diag(p^n, 1), (0, p^{n-1}; p, 0), (0, 1; p^n, 0), with duplicates removed."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    q = p**n
    cands = [Mat2.of(1, 0, 0, q), Mat2.of(q, 0, 0, 1)]
    if n >= 1:
        cands += [Mat2.of(0, p ** (n - 1), p, 0), Mat2.of(0, 1, q, 0)]
    out, seen = [], set()
    for m in cands:
        cls = classify(m, p)
        if cls not in seen:
            seen.add(cls)
            out.append(m)
    return out
