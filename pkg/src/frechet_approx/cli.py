"""Command-line interface.

Exit status: 0 on success, 2 on usage errors (bad flags, unreadable or
malformed input), 1 when a computation breaks one of its own guarantees.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import bench, models
from .errors import ContractError, UsageError
from .freespace import decide_reachable
from .geometry import ClosedCurve
from .io import load_curve, parse_curve, write_curve
from .oracle import exact_frechet
from .search import AtMost, approx_frechet, approx_frechet_cascade, fuzzy_decide
from .closed import approx_frechet_closed, closed_fuzzy_decide
from .simplify import simplify, simplify_closed
from .svg import render_freespace_svg


def _num(x: float) -> str:
    return f"{x:.12g}"


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _params(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _pair(args):
    A = load_curve(args.A, closed=args.closed or None)
    B = load_curve(args.B, closed=args.closed or None)
    if isinstance(A, ClosedCurve) != isinstance(B, ClosedCurve):
        raise UsageError("one curve is closed and the other is open; pass --closed to treat both as closed")
    return A, B


def cmd_dist(args):
    A, B = _pair(args)
    payload = {"eps": args.eps, "closed": isinstance(A, ClosedCurve)}
    if isinstance(A, ClosedCurve):
        r = approx_frechet_closed(A, B, args.eps)
        payload["b_start"] = r.b_start
    else:
        fn = approx_frechet_cascade if args.cascade else approx_frechet
        r = fn(A, B, args.eps)
    payload["value"] = r.value
    payload["decisions"] = r.stats.decisions
    payload["cells"] = r.stats.cells
    lines = [_num(r.value)]
    if args.matching:
        payload["matching"] = [[float(s), float(t)] for s, t in zip(r.matching.s, r.matching.t)]
        lines.extend(f"{_num(s)} {_num(t)}" for s, t in payload["matching"])
    _emit(args, payload, "\n".join(lines))


def cmd_decide(args):
    A, B = _pair(args)
    closed = isinstance(A, ClosedCurve)
    if args.delta < 0:
        raise UsageError("delta must be non-negative")
    if args.eps is None:
        if closed:
            raise UsageError("closed curves need --eps for deciding")
        ok = decide_reachable(A, B, args.delta, record=False).endReachable
        bound = args.delta
    else:
        decide = closed_fuzzy_decide if closed else fuzzy_decide
        r = decide(A, B, args.delta, args.eps)
        ok = isinstance(r, AtMost)
        bound = r.bound if ok else args.delta
    answer = "LEQ" if ok else "GT"
    _emit(args, {"answer": answer, "bound": bound, "delta": args.delta, "eps": args.eps},
          f"{answer} {_num(bound)}")


def cmd_simplify(args):
    P = load_curve(args.A)
    if isinstance(P, ClosedCurve):
        R = simplify_closed(P, args.mu)
    else:
        R = simplify(P, args.mu)
    text = write_curve(R.simplified).rstrip("\n")
    _emit(args, {"kept_indices": [int(k) for k in R.kept_indices], "mu": args.mu,
                 "vertices": R.simplified.vertices.tolist(),
                 "closed": isinstance(P, ClosedCurve)}, text)


def cmd_exact(args):
    A, B = _pair(args)
    if isinstance(A, ClosedCurve):
        raise UsageError("the exact oracle handles open curves only")
    v = exact_frechet(A, B)
    _emit(args, {"value": v}, _num(v))


def cmd_gen(args):
    C = models.generate(args.family, _params(args.params), args.seed)
    text = write_curve(C)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    _emit(args, {"family": args.family, "closed": isinstance(C, ClosedCurve),
                 "vertices": C.vertices.tolist()}, text.rstrip("\n"))


def cmd_check(args):
    P = load_curve(args.A)
    if args.kind == "packed":
        r = models.estimate_packedness(P, args.trials, args.seed)
        payload = {"kind": "packed", "lower_bound": r.lower_bound_c, "samples": r.samples,
                   "witness_center": r.witness[0].tolist(), "witness_radius": r.witness[1]}
        value = r.lower_bound_c
    elif args.kind == "density":
        r = models.check_low_density(P, args.trials, args.seed)
        payload = {"kind": "density", "lower_bound": r.max_count, "samples": r.samples,
                   "witness_center": r.witness[0].tolist(), "witness_radius": r.witness[1]}
        value = r.max_count
    else:
        value = models.check_kappa_straight(P, args.trials, args.seed)
        payload = {"kind": "straight", "lower_bound": value}
    _emit(args, payload, f"{args.kind} >= {_num(value)}")


def cmd_bench(args):
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad size list {args.sizes!r}") from None
    rows = bench.run_bench(args.family, sizes, args.eps, args.seed, args.repeats,
                           args.method, args.workers)
    if args.csv == "-":
        bench.write_csv(rows, sys.stdout)
        return
    bench.write_csv(rows, args.csv)
    if args.format == "json":
        print(json.dumps(rows, sort_keys=True))
    else:
        for r in rows:
            print(f"n={r['n']} value={_num(r['value'])} cells={r['cells']} millis={r['millis']:.1f}")


def cmd_fsd_svg(args):
    A, B = _pair(args)
    if isinstance(A, ClosedCurve):
        raise UsageError("free-space rendering handles open curves only")
    D = decide_reachable(A, B, args.delta, record=True)
    render_freespace_svg(D, args.out, samples=args.samples)
    _emit(args, {"visited": D.visitedCount, "end_reachable": D.endReachable, "out": args.out},
          f"visited {D.visitedCount} cells, end {'reachable' if D.endReachable else 'unreachable'}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    p = argparse.ArgumentParser(prog="frechet-approx",
                                description="Approximate Frechet distance between polygonal curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def pair_cmd(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("A")
        s.add_argument("B")
        s.add_argument("--closed", action="store_true", help="treat both inputs as closed curves")
        return s

    s = pair_cmd("dist", "(1+eps)-approximate distance")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--matching", action="store_true", help="also print the witnessing matching")
    s.add_argument("--cascade", action="store_true", help="use the cascaded refinement")
    s.set_defaults(func=cmd_dist)

    s = pair_cmd("decide", "is the distance at most delta?")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--eps", type=float, default=None, help="answer approximately within 1+eps")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("simplify", parents=[common], help="greedy mu-simplification")
    s.add_argument("A")
    s.add_argument("--mu", type=float, required=True)
    s.set_defaults(func=cmd_simplify)

    s = pair_cmd("exact", "exact distance for small open curves")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("gen", parents=[common], help="generate a curve")
    s.add_argument("family", choices=models.FAMILIES)
    s.add_argument("--params", default="", help="comma-separated key=value pairs, e.g. m=4,d=2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("check", parents=[common], help="sampled model checks")
    s.add_argument("kind", choices=("packed", "density", "straight"))
    s.add_argument("A")
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("bench", parents=[common], help="scaling benchmark")
    s.add_argument("--family", choices=bench.BENCH_FAMILIES, default="spiral")
    s.add_argument("--sizes", required=True, help="comma-separated vertex counts")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--csv", required=True, help="output path, or - for stdout")
    s.add_argument("--repeats", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=bench.METHODS, default="approx")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_bench)

    s = pair_cmd("fsd-svg", "render the reachable free space as SVG")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--samples", type=int, default=32, help="boundary samples per cell edge")
    s.set_defaults(func=cmd_fsd_svg)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
