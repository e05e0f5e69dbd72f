"""Acceptance checks shared by `krden verify` and the test suite.

Each check returns a Check whose `ok` is an exact equality verdict.  Checks in
the slow tier run rank-3 brute force and take minutes.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from krden import class_counting, divisor_ledger, global_series, hecke_cosets, kr_engine
from krden import density_poly as dp
from krden.density_poly import DensityPolynomial, DerivedKind
from krden.errors import BudgetExceeded, KrdenError
from krden.lattice_algebra import (
    catalog,
    diagonal,
    dual,
    h0p,
    heps,
    hyperbolic,
    is_anisotropic,
    orthosum,
    rescale,
)
from krden.padic_arith import smallest_nonresidue, valuation
from krden.rep_counting import density, pden_closed


@dataclass
class Check:
    criterion: int
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.criterion:>2} {self.name}: {self.detail}"

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "ok": self.ok, "detail": self.detail}


X = DensityPolynomial((Fraction(0), Fraction(1)))


def _poly(*coeffs) -> DensityPolynomial:
    return DensityPolynomial(tuple(Fraction(c) for c in coeffs))


def _units(p: int) -> tuple[int, int]:
    return 1, smallest_nonresidue(p)


# ------------------------------------------------------------------ criteria


def rank1_primitive(primes=(3, 5)) -> tuple[bool, str]:
    bad, n = [], 0
    for p in primes:
        for k, eps, v in itertools.product(range(1, 5), (1, -1), range(3)):
            s = p**v
            brute = density(heps(p, k, eps), diagonal(p, [s]), primitive=True).normalized
            n += 1
            if brute != pden_closed(k, eps, s, p):
                bad.append((p, k, eps, v))
    return not bad, f"{n} cases, mismatches {bad}"


def plane_constants(primes=(3, 5)) -> tuple[bool, str]:
    out = []
    for p in primes:
        a = density(hyperbolic(p, 1), diagonal(p, [1])).normalized
        b = density(rescale(hyperbolic(p, 1), p), diagonal(p, [p])).normalized
        out.append(a == 1 - Fraction(1, p) and b == p - 1)
    return all(out), f"p={primes}"


def base_lattices(p: int) -> dict[str, list]:
    """The four base configurations with their expected polynomials and derivatives."""
    u1, u2 = _units(p)
    q = Fraction(p)
    H2m = heps(p, 2, -1)
    minus = (1 - X * (1 / q)) * (1 - X) * _poly(1, -(p - 1), -1)
    plus = (1 - X * (1 / q)) * (1 + X) * _poly(1, p - 1, -1)
    rows = {}
    for u in (u1, u2):
        rows[f"H2- + <{u}p>"] = [h0p(p), orthosum(H2m, diagonal(p, [u * p])), minus, DerivedKind.H0P, -1]
        rows[f"<{u}> + H2-[p]"] = [
            h0p(p), orthosum(diagonal(p, [u]), rescale(H2m, p)),
            (1 - X * (1 / q)) * _poly(1, 0, -2, 0, 1), DerivedKind.H0P, 0,
        ]
        rows[f"<{u}/p> + H2-"] = [
            dual(h0p(p)), orthosum(diagonal(p, [Fraction(u, p)]), H2m),
            _poly(p, -(1 + p), 1) * (q ** -7 * (p - 1)), DerivedKind.H0P_DUAL, 1,
        ]
        rows[f"H2-[1/p] + <{u}>"] = [
            dual(h0p(p)), orthosum(rescale(H2m, Fraction(1, p)), diagonal(p, [u])),
            _poly(), DerivedKind.H0P_DUAL, 0,
        ]
    rows["H2+ + <p>"] = [h0p(p), orthosum(hyperbolic(p, 1), diagonal(p, [p])), plus, None, None]
    return rows


def base_polynomials(p: int = 3, brute_node: bool = False) -> tuple[bool, str]:
    bad = []
    for name, (M, L, expected, _, _) in base_lattices(p).items():
        got = dp.den_poly(M, L)
        if not got.same_as(expected):
            bad.append(name)
        if brute_node and density(M, L).normalized != expected(1):
            bad.append(name + " (k=0 brute force)")
    return not bad, f"mismatches {bad}" + (" incl. brute-force k=0 nodes" if brute_node else "")


def derived_base_values(p: int = 3) -> tuple[bool, str]:
    bad = []
    for name, (_, L, _, kind, value) in base_lattices(p).items():
        if kind is not None and dp.dden(kind, L) != value:
            bad.append(name)
    geo = [divisor_ledger.base_intersection(g, p) for g in ((0, 0, 1), (0, 1, 1))]
    if geo != [-1, 0]:
        bad.append(f"geometric {geo}")
    return not bad, f"mismatches {bad}"


def _count(target: list, source: list, p: int) -> Fraction:
    """Brute-force density of diagonal forms: digit search for rank 1, class convolution for rank 2."""
    if not source:
        return Fraction(1)
    if any(valuation(s, p) < 0 for s in source):
        return Fraction(0)
    if len(source) == 1:
        return density(diagonal(p, target), diagonal(p, source)).normalized
    return class_counting.density_diagonal(tuple(Fraction(t) for t in target), tuple(source), p)


def _pden(rank: int, eps: int, s: Fraction, p: int) -> Fraction:
    if valuation(s, p) < 0:
        return Fraction(0)
    return density(heps(p, rank, eps), diagonal(p, [s]), primitive=True).normalized


def vertex_instances(p: int = 3) -> list[tuple[list, Fraction]]:
    u1, u2 = _units(p)
    Ms = [[]] + [[Fraction(u * p**j)] for u in (u1, u2) for j in range(3)]
    xs = [Fraction(u * p**n) for u in (u1, u2) for n in range(3)]
    return [(M, s) for M in Ms for s in xs]


def vertex_difference(p: int = 3) -> tuple[bool, str]:
    """Den(L, M+<x>) for L = H_2^+[p] + H_2^+ against the three counted terms."""
    q = Fraction(p)
    plane = [1, -1]
    L = [p * t for t in plane] + plane
    bad, n = [], 0
    for M, s in vertex_instances(p):
        m = len(M)
        lhs = _count(L, M + [s], p)
        rhs = q ** (m - 2) * _count(L, M + [s / p**2], p)
        rhs += q ** (m - 1) * _count(plane + [-s], M, p) * _pden(2, 1, s / p, p)
        rhs += _count([p * t for t in plane] + [-s], M, p) * _pden(2, 1, s, p)
        n += 1
        if lhs != rhs:
            bad.append((M, s))
    return not bad and n >= 20, f"{n} instances, mismatches {bad}"


def flat_lattices(p: int) -> list[list[Fraction]]:
    u1, u2 = _units(p)
    seen, out = set(), []
    for a, b in ((0, 0), (0, 1), (1, 1)):
        for v1, v2 in itertools.product((u1, u2), repeat=2):
            key = dp.canon([v1 * p**a, v2 * p**b], p)
            if key not in seen:
                seen.add(key)
                out.append(list(key))
    return out


def polynomial_difference(p: int = 3, max_n: int = 3) -> tuple[bool, str]:
    q = Fraction(p)
    u1, u2 = _units(p)
    H = h0p(p)
    bad, n_cases = [], 0
    for flat in flat_lattices(p):
        Lf = diagonal(p, flat)
        for n, u in itertools.product(range(max_n + 1), (u1, u2)):
            s = Fraction(u * p**n)
            lhs = dp.den_poly(H, diagonal(p, flat + [s])) - X * X * dp.den_poly(H, diagonal(p, flat + [s / p**2]))
            A = dp.den_poly(dp.derived_target(DerivedKind.AUG_SCALED, p, s), Lf)
            if n == 0:
                rhs = (1 - X * (1 / q)) * A
            else:
                B = dp.den_poly(dp.derived_target(DerivedKind.AUG_SPLIT, p, s), Lf)
                rhs = (1 - X * (1 / q)) * (1 + X) * A + (min(n, 2) * (p - 1)) * X * X * B
            n_cases += 1
            if not lhs.same_as(rhs):
                bad.append((flat, s))
    return not bad, f"{n_cases} instances, mismatches {bad}"


def anisotropic_diagonals(p: int, max_sum: int) -> list[list[int]]:
    u1, u2 = _units(p)
    seen, out = set(), []
    for a in itertools.product(range(max_sum + 1), repeat=3):
        if sum(a) > max_sum or list(a) != sorted(a):
            continue
        for us in itertools.product((u1, u2), repeat=3):
            entries = [u * p**e for u, e in zip(us, a)]
            key = dp.canon(entries, p)
            if key in seen or not is_anisotropic(diagonal(p, entries)):
                continue
            seen.add(key)
            out.append(entries)
    return out


def route_independence(p: int = 3, max_sum: int = 4) -> tuple[bool, str]:
    bad, n = [], 0
    for entries in anisotropic_diagonals(p, max_sum):
        L = diagonal(p, entries)
        for f in (kr_engine.dden_h0p, kr_engine.dden_h0p_dual):
            vals = {r: f(L, route=r).value for r in ("recursion", "stepwise", "interpolation")}
            n += 1
            if len(set(vals.values())) != 1:
                bad.append((entries, f.__name__, vals))
    return not bad, f"{n} comparisons, mismatches {bad}"


def scaling_law(p: int = 3, pairs: int = 10, seed: int = 7) -> tuple[bool, str]:
    rng = random.Random(seed)
    u1, u2 = _units(p)
    bad, done, tried = [], 0, 0
    while done < pairs and tried < 100:
        tried += 1
        M = diagonal(p, [rng.choice((u1, u2)) * p ** rng.randint(0, 1) for _ in range(rng.randint(2, 3))])
        n = rng.randint(1, 2)
        L = diagonal(p, [rng.choice((u1, u2)) * p ** rng.randint(0, 1) for _ in range(n)])
        try:
            base = density(M, L).normalized
            if base == 0:
                continue
            scaled = density(rescale(M, p), rescale(L, p)).normalized
        except BudgetExceeded:
            continue
        done += 1
        if scaled != Fraction(p) ** (n * (n + 1) // 2) * base:
            bad.append((M.gram, L.gram))
    return not bad and done == pairs, f"{done} pairs with nonzero density, mismatches {len(bad)}"


def closed_form_identity(p: int = 3, top: int = 3) -> tuple[bool, str]:
    closed = dp.dden_rank2_closed
    bad = [
        (a, b)
        for a in range(top + 1)
        for b in range(a, top + 1)
        if closed("augscaled", a, b, p) != p * p * closed("rescaled", a, b, p) - 1
    ]
    return not bad, f"grid a<=b<={top}, mismatches {bad}"


def ob_dual_constant(p: int = 3) -> tuple[bool, str]:
    u1, _ = _units(p)
    L = orthosum(diagonal(p, [Fraction(u1, p)]), heps(p, 2, -1))
    value = density(catalog("OBDual", p), L).normalized
    expected = Fraction(2 * (p + 1) ** 2, p**7)
    return value == expected, f"Den(O_B^dual, L) = {value}, expected {expected}"


def pic_ledger(max_n: int = 6) -> tuple[bool, str]:
    P = divisor_ledger.PicClass
    ok = divisor_ledger.pic_intersect(P(1, 0), P(0, 1)) == 1
    ok &= divisor_ledger.pic_intersect(P(2, 1), P(1, 2)) == 5
    ok &= divisor_ledger.exc_selfclass() == P(-1, -1)
    for n in range(max_n + 1):
        total = (n + 1) * P(-1, -1) + P(n + 1, n)
        ok &= total == P(0, -1)
        ok &= divisor_ledger.decompose_special(n).restriction_to_exc() == total
    ok &= divisor_ledger.base_intersection((0, 0, 1), 3) == -2 + 1
    return bool(ok), f"n <= {max_n}"


def _random_gamma0(rng: random.Random, p: int) -> hecke_cosets.Mat2:
    mod = p**4
    while True:
        g = hecke_cosets.Mat2.of(rng.randrange(mod), rng.randrange(mod), p * rng.randrange(mod), rng.randrange(mod))
        if g.in_gamma0(p):
            return g


def coset_classifier(p: int = 3, trials: int = 200, seed: int = 11) -> tuple[bool, str]:
    rng = random.Random(seed)
    Mat2 = hecke_cosets.Mat2
    bad = 0
    for _ in range(trials):
        while True:
            x = Mat2.of(*(rng.randrange(-p**3, p**3 + 1) for _ in range(4)))
            if x.det != 0:
                break
        cls = hecke_cosets.classify(x, p)
        if hecke_cosets.classify(_random_gamma0(rng, p) @ x @ _random_gamma0(rng, p), p) != cls:
            bad += 1
    seen: dict[int, set] = {}
    top = p**3
    for a, b, d in itertools.product(range(top + 1), repeat=3):
        for c in range(0, top + 1, p):
            x = Mat2.of(a, b, c, d)
            if x.det == 0 or not hecke_cosets.is_primitive(x, p):
                continue
            n = valuation(x.det, p)
            if n <= 3:
                seen.setdefault(n, set()).add(hecke_cosets.classify(x, p))
    counts = {n: len(s) for n, s in sorted(seen.items())}
    ok = bad == 0 and all(counts[n] == hecke_cosets.class_count(n) for n in range(4))
    return ok, f"{bad} invariance failures, classes per n {counts}"


def isotropic_by_search(t, v: int) -> bool:
    """Search for primitive x with x^T (2T) x = 0 mod v^N, lifting one digit at a time.

    A primitive zero modulo v^N with N = v(det 2T) + 5 exists exactly when the
    ternary form is isotropic over Q_v.  Solutions are normalized to have a unit
    coordinate equal to 1, which the squaring action of units permits.
    """
    g = [[int(2 * x) for x in row] for row in t]
    det2 = abs(int(round(global_series._det3(t) * 8)))
    N = valuation(det2, v) + 5
    sols = []
    for i in range(3):
        for rest in itertools.product(range(v), repeat=2 - i):
            x = [0] * i + [1] + list(rest)
            sols.append((tuple(x), i))
    level = 1
    current = [(x, i) for x, i in sols if _qval(g, x) % v == 0]
    while current and level < N:
        nxt = []
        step = v**level
        for x, i in current:
            free = [j for j in range(3) if j != i]
            for d in itertools.product(range(v), repeat=2):
                y = list(x)
                for j, dj in zip(free, d):
                    y[j] += dj * step
                if _qval(g, y) % (step * v) == 0:
                    nxt.append((tuple(y), i))
        current, level = nxt, level + 1
    return bool(current)


def _qval(g, x) -> int:
    return int(sum(g[i][j] * x[i] * x[j] for i in range(3) for j in range(3)))


def diff_sets(max_diag: int = 3, samples: int = 100, seed: int = 5) -> tuple[bool, str]:
    even = 0
    total = 0
    for m in itertools.product(range(1, max_diag + 1), repeat=3):
        for t in global_series.enumerate_t(*m):
            total += 1
            even += len(global_series.diff_set(t)) % 2 == 0
    rng = random.Random(seed)
    mismatches = 0
    checked = 0
    while checked < samples:
        m = [rng.randint(1, 4) for _ in range(3)]
        ts = global_series.enumerate_t(*m)
        t = rng.choice(ts)
        for v in (2, 3, 5, 7):
            if valuation(abs(global_series._det3(t) * 8), v) > 0 or v == 2:
                mismatches += (not global_series.is_isotropic_at(t, v)) != (not isotropic_by_search(t, v))
        checked += 1
    ok = even == 0 and mismatches == 0
    return ok, f"{total} enumerated T with {even} of even |Diff|; {checked} sampled T, {mismatches} oracle mismatches"


# -------------------------------------------------------------------- driver

CHECKS: list[tuple[int, str, str, Callable[[], tuple[bool, str]]]] = [
    (1, "rank-1 primitive densities", "fast", rank1_primitive),
    (2, "Den(H_2^+, H_1^+) constants", "fast", plane_constants),
    (3, "base density polynomials", "fast", base_polynomials),
    (3, "base polynomials, brute-force k=0", "slow", lambda: base_polynomials(brute_node=True)),
    (4, "derived base values", "fast", derived_base_values),
    (5, "vertex difference formula", "fast", vertex_difference),
    (6, "polynomial difference formula", "fast", polynomial_difference),
    (7, "route independence", "fast", route_independence),
    (8, "scaling law", "fast", scaling_law),
    (9, "closed-form rank-2 identity", "fast", closed_form_identity),
    (10, "O_B^dual constant", "slow", ob_dual_constant),
    (11, "Pic ledger", "fast", pic_ledger),
    (12, "coset classifier", "fast", coset_classifier),
    (13, "Diff(T) parity and oracle", "fast", diff_sets),
]


def run_check(criterion: int, name: str, func) -> Check:
    start = time.perf_counter()
    try:
        ok, detail = func()
    except BudgetExceeded as exc:
        ok, detail = False, f"budget-exceeded: {exc}"
    except KrdenError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(criterion, name, ok, detail, time.perf_counter() - start)


def run(tier: str = "fast") -> list[Check]:
    tiers = {"fast": ("fast",), "slow": ("fast", "slow")}[tier]
    return [run_check(c, name, f) for c, name, t, f in CHECKS if t in tiers]
