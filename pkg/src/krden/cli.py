"""Command-line front end: one JSON document per call on stdout, errors on stderr."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from krden import density_poly as dp
from krden import divisor_ledger, global_series, hecke_cosets, kr_engine, rep_counting
from krden.errors import InvalidInput, KrdenError
from krden.lattice_algebra import fundamental_invariants, is_anisotropic, jordan, parse_lattice
from krden.padic_arith import rat, rat_str


def _lattice(args, name: str = "L"):
    return parse_lattice(getattr(args, name), args.p)


def cmd_count(args) -> dict:
    M, L = _lattice(args, "M"), _lattice(args)
    here = rep_counting.normalized_count(M, L, args.depth, primitive=args.primitive)
    nxt = rep_counting.normalized_count(M, L, args.depth + 1, primitive=args.primitive)
    out = here.to_json()
    out["stabilized"] = here.normalized == nxt.normalized
    return out


def cmd_density(args) -> dict:
    if args.primitive:
        return rep_counting.density(_lattice(args, "M"), _lattice(args), primitive=True).to_json()
    return {"value": rat_str(dp.den(_lattice(args, "M"), _lattice(args)))}


def cmd_denpoly(args) -> dict:
    return dp.den_poly(_lattice(args, "M"), _lattice(args)).to_json()


def cmd_dden(args) -> dict:
    kind = dp.DerivedKind(args.kind)
    x = rat(args.x) if args.x is not None else None
    return {"value": rat_str(dp.dden(kind, _lattice(args), x))}


def cmd_int(args) -> dict:
    L = _lattice(args)
    if args.kind == "Z":
        if L.rank == 3 and L.is_integral() and is_anisotropic(L):
            return kr_engine.dden_h0p(L, route=args.route).to_json()
        return {"value": rat_str(kr_engine.int_z(L)), "route": "empty-cycle", "trace": []}
    if args.kind == "Y":
        res = kr_engine.dden_h0p_dual(L, route=args.route)
        return {**res.to_json(), "value": rat_str(res.value - 1)}
    if args.kind == "CM":
        return {"value": rat_str(kr_engine.int_cm(L)), "route": "recursion", "trace": []}
    return kr_engine.dden_hyperspecial(L, route=args.route).to_json()


def cmd_gk(args) -> dict:
    return {"gk": fundamental_invariants(_lattice(args))}


def cmd_jordan(args) -> dict:
    return {"blocks": [{"exponent": b.exponent, "rank": b.rank, "eps": b.eps} for b in jordan(_lattice(args))]}


def cmd_coset(args) -> dict:
    return hecke_cosets.classify(hecke_cosets.Mat2.parse(args.matrix), args.p).to_json()


def _t_json(t) -> list[list[str]]:
    return [[rat_str(x) for x in row] for row in t]


def cmd_difft(args) -> dict:
    return {"diff": sorted(global_series.diff_set(global_series.parse_t(args.T)))}


def cmd_enumt(args) -> dict:
    m = [int(s) for s in args.diag.split(",")]
    if len(m) != 3:
        raise InvalidInput("--diag needs three entries")
    ts = global_series.enumerate_t(*m)
    return {"count": len(ts), "T": [_t_json(t) for t in ts]}


def cmd_ledger(args) -> dict:
    out = divisor_ledger.decompose_special(args.n).to_json()
    if args.n >= 1:
        out["exc_multiplicity"] = rat_str(divisor_ledger.exc_multiplicity(args.n, args.p))
    return out


def cmd_geodiff(args) -> dict:
    a, b = fundamental_invariants(_lattice(args, "Lflat"))
    return divisor_ledger.geometric_difference(a, b, args.xval, args.p).to_json()


def cmd_verify(args) -> dict:
    from krden import verify

    results = verify.run(args.tier)
    return {"tier": args.tier, "passed": all(r.ok for r in results), "checks": [r.to_json() for r in results]}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    parser = argparse.ArgumentParser(prog="krden", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("count", cmd_count, "representation count at a fixed depth")
    sp.add_argument("--M", required=True)
    sp.add_argument("--L", required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--primitive", action="store_true")

    sp = add("density", cmd_density, "local density Den(M, L)")
    sp.add_argument("--M", required=True)
    sp.add_argument("--L", required=True)
    sp.add_argument("--primitive", action="store_true")

    sp = add("denpoly", cmd_denpoly, "the polynomial Den(X, M, L)")
    sp.add_argument("--M", required=True)
    sp.add_argument("--L", required=True)

    sp = add("dden", cmd_dden, "derived local density")
    sp.add_argument("--kind", required=True, choices=[k.value for k in dp.DerivedKind])
    sp.add_argument("--L", required=True)
    sp.add_argument("--x", help="q(x) for the augmented kinds")

    sp = add("int", cmd_int, "intersection numbers")
    sp.add_argument("--kind", required=True, choices=["Z", "Y", "CM", "hyperspecial"])
    sp.add_argument("--L", required=True)
    sp.add_argument("--route", default="recursion", choices=["recursion", "stepwise", "interpolation"])

    add("gk", cmd_gk, "fundamental invariants").add_argument("--L", required=True)
    add("jordan", cmd_jordan, "Jordan decomposition").add_argument("--L", required=True)
    add("coset", cmd_coset, "Gamma_0(p) double coset of a 2x2 matrix").add_argument("--matrix", required=True)
    add("difft", cmd_difft, "the set Diff(T)").add_argument("--T", required=True)
    add("enumt", cmd_enumt, "positive-definite T with fixed diagonal").add_argument("--diag", required=True)
    add("ledger", cmd_ledger, "divisor decomposition of Z(x)").add_argument("--n", type=int, required=True)

    sp = add("geodiff", cmd_geodiff, "strata contributions to the difference formula")
    sp.add_argument("--Lflat", required=True)
    sp.add_argument("--xval", type=int, required=True)

    add("verify", cmd_verify, "run the acceptance checks").add_argument(
        "--tier", default="fast", choices=["fast", "slow"]
    )
    return parser


def _default(obj):
    if isinstance(obj, Fraction):
        return rat_str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.p < 3 or any(args.p % q == 0 for q in range(2, math.isqrt(args.p) + 1)):
        print(json.dumps({"error": "p must be an odd prime"}), file=sys.stderr)
        return 2
    try:
        out = args.func(args)
    except KrdenError as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return exc.exit_code
    print(json.dumps(out, default=_default, sort_keys=True))
    if args.command == "verify" and not out["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
