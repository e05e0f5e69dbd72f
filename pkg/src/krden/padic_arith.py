"""Exact rationals with p-adic valuations, residue characters and Hilbert symbols."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Union

from krden.errors import InvalidInput

Rat = Fraction
RatLike = Union[int, Fraction, str]


@total_ordering
class _Infinity:
    """Valuation of zero; compares above every integer."""

    _instance: "_Infinity | None" = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return False

    def __hash__(self) -> int:
        return hash("krden-infinity")

    def __add__(self, other: object) -> "_Infinity":
        return self

    __radd__ = __add__

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = _Infinity()


def rat(x: RatLike) -> Fraction:
    """Coerce an int, Fraction or "a/b" string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational: {x!r}") from exc
    raise InvalidInput(f"not a rational: {x!r}")


def rat_str(r: Fraction) -> str:
    r = rat(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(r: RatLike, p: int) -> "int | _Infinity":
    r = rat(r)
    if r == 0:
        return INFINITY
    return _int_val(r.numerator, p) - _int_val(r.denominator, p)


def unit_part(r: RatLike, p: int) -> Fraction:
    """r / p^v(r); raises on zero."""
    r = rat(r)
    if r == 0:
        raise InvalidInput("zero has no unit part")
    v = valuation(r, p)
    return r / Fraction(p) ** v


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def chi(u: RatLike, p: int) -> int:
    """Quadratic residue character of the square class of u at an odd prime p."""
    u = rat(u)
    if u == 0:
        raise InvalidInput("chi of zero is undefined")
    if valuation(u, p) % 2:
        return 0
    w = unit_part(u, p)
    return legendre(w.numerator, p) * legendre(w.denominator, p)


def smallest_nonresidue(p: int) -> int:
    return next(a for a in range(2, p) if legendre(a, p) == -1)


def to_residue(r: RatLike, p: int, d: int) -> int:
    """Image of a p-integral rational in Z/p^d."""
    r = rat(r)
    mod = p**d
    if r.denominator % p == 0:
        raise InvalidInput(f"{r} is not p-integral")
    return r.numerator * pow(r.denominator, -1, mod) % mod


def hilbert(a: RatLike, b: RatLike, v: "int | str") -> int:
    """Hilbert symbol (a, b)_v, with v a prime or "inf"."""
    a, b = rat(a), rat(b)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol needs nonzero arguments")
    if v in ("inf", "oo", "infinity"):
        return -1 if (a < 0 and b < 0) else 1
    p = int(v)
    # Squares of denominators do not change the symbol.
    a_int = a.numerator * a.denominator
    b_int = b.numerator * b.denominator
    alpha, u = _int_val(a_int, p), a_int // p ** _int_val(a_int, p)
    beta, w = _int_val(b_int, p), b_int // p ** _int_val(b_int, p)
    if p != 2:
        sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
        return sign * legendre(u, p) ** beta * legendre(w, p) ** alpha
    eps = lambda x: ((x - 1) // 2) % 2
    omega = lambda x: ((x * x - 1) // 8) % 2
    e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
    return -1 if e % 2 else 1
