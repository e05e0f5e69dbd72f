"""Compare the compiled and pure-Python digit-layer kernels on a few counting problems.

Run with `python3 benchmarks/bench_counting.py [--repeat N]`.  Both kernels must
return the same count; the table reports the best wall time of each.
"""

import argparse
import time

from krden import rep_counting
from krden.lattice_algebra import diagonal, h0p, heps, parse_lattice

CASES = [
    ("H+:4 vs <9>, d=3", lambda p: (heps(p, 4, 1), diagonal(p, [9]), 3, False)),
    ("H+:4 vs <9>, primitive, d=3", lambda p: (heps(p, 4, 1), diagonal(p, [9]), 3, True)),
    ("H0(p) vs <1,2>, d=2", lambda p: (h0p(p), diagonal(p, [1, 2]), 2, False)),
    ("H0(p) vs <1,3,9>, d=2", lambda p: (h0p(p), parse_lattice("diag:1,3,9", p), 2, False)),
    ("H+:4 vs <1,9>, d=3", lambda p: (heps(p, 4, 1), diagonal(p, [1, 9]), 3, False)),
    ("H+:5 vs <27>, d=4", lambda p: (heps(p, 5, 1), diagonal(p, [27]), 4, False)),
]


def best_time(func, repeat: int) -> tuple[float, int]:
    best, value = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        value = func()
        best = min(best, time.perf_counter() - start)
    return best, value


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["python"] + (["cython"] if rep_counting.BACKEND == "cython" else [])
    print(f"{'case':32} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, build in CASES:
        M, L, d, prim = build(args.p)
        times, counts = [], []
        for b in backends:
            count = rep_counting.count_prim_reps if prim else rep_counting.count_reps
            t, c = best_time(lambda: count(M, L, d, backend=b), args.repeat)
            times.append(t)
            counts.append(c)
        assert len(set(counts)) == 1, f"kernels disagree on {name}: {counts}"
        speedup = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else "      n/a"
        print(f"{name:32} " + " ".join(f"{t:9.3f}s" for t in times) + f" {speedup}")


if __name__ == "__main__":
    main()
