"""Command-line front end.

Exit status: 0 success, 1 a validation check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

import numpy as np

from . import analysis, hardy, vaaler
from .lattice_count import AmbiguityError, BodyParams, ScalarPolicy, count_A
from .special_fn import SeriesConfig

WORKERS_ENV = "LAMELATTICE_WORKERS"


class UsageError(Exception):
    pass


def _clean(v):
    """Round floats to 15 significant digits for JSON output."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    if not math.isfinite(f):
        return str(f)
    return float(format(f, ".15g"))


@contextmanager
def _out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _emit_json(obj, path):
    with _out(path) as fh:
        fh.write(json.dumps(_clean(obj), indent=2) + "\n")


def _emit_records(recs, fmt: str, path, single: bool = False):
    if fmt == "csv":
        with _out(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(analysis.CSV_HEADER)
            for r in recs:
                w.writerow(r.csv_row())
        return
    rows = [{f: getattr(r, f) for f in analysis.CSV_HEADER} for r in recs]
    _emit_json(rows[0] if single else rows, path)


def _policy(args, *exponents) -> ScalarPolicy:
    if args.policy == "auto":
        return ScalarPolicy.for_exponents(*exponents, guard_eps=args.guard_eps)
    mode = "exact-integer" if args.policy == "exact" else "guarded-float"
    if mode == "exact-integer" and not all(float(e).is_integer() for e in exponents):
        raise UsageError("--policy exact needs integral exponents")
    return ScalarPolicy(mode, args.guard_eps)


def _series(args) -> SeriesConfig:
    n = None if args.n_max == "full" else int(args.n_max)
    return SeriesConfig(n_max=n)


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _body(args, relaxed=False) -> BodyParams:
    try:
        return BodyParams(args.m, args.k, relaxed=relaxed)
    except ValueError as exc:
        raise UsageError(str(exc))


def _grid(args) -> list:
    if args.grid:
        try:
            xs = [float(v) for v in args.grid.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad --grid {args.grid!r}")
    elif args.x_min is not None and args.x_max is not None:
        if args.points < 1:
            raise UsageError("--points must be positive")
        if args.spacing == "log":
            if not (args.x_min > 0 and args.x_max > 0):
                raise UsageError("log spacing needs positive bounds")
            xs = list(np.geomspace(args.x_min, args.x_max, args.points))
        else:
            xs = list(np.linspace(args.x_min, args.x_max, args.points))
    else:
        raise UsageError("give --grid or --x-min/--x-max")
    try:
        return analysis.check_grid(xs)
    except ValueError as exc:
        raise UsageError(str(exc))


# -- subcommands ---------------------------------------------------------------------


def cmd_count(args) -> int:
    p = _body(args, relaxed=True)
    if args.x < 0:
        raise UsageError("--x must be nonnegative")
    res = count_A(p, args.x, _policy(args, p.m, p.k), method=args.method)
    with _out(args.output) as fh:
        fh.write(f"{res.count}\n")
    if res.ambiguous:
        print(f"{res.ambiguous} boundary points undecided", file=sys.stderr)
        return 1
    return 0


def cmd_disc(args) -> int:
    p = _body(args)
    if not args.x > 0:
        raise UsageError("--x must be positive")
    rec = analysis.discrepancy_record(p, args.x, _policy(args, p.m, p.k), _series(args))
    _emit_records([rec], args.format or "json", args.output, single=True)
    return 0


def cmd_sweep(args) -> int:
    p = _body(args)
    xs = _grid(args)
    recs = analysis.sweep(p, xs, _policy(args, p.m, p.k), _series(args), workers=_workers(args))
    _emit_records(recs, args.format or "csv", args.output)
    return 0


def cmd_hardy(args) -> int:
    try:
        ev = hardy.theorem2_check(args.k, args.W, args.lam, args.order_rule,
                                  tuple(args.selector.split(",")), c0=args.c0)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc))
    report = dict(ev._asdict(), c_emp=ev.c_emp, k=args.k, W=args.W, lam=args.lam)
    _emit_json(report, args.output)
    if args.max_c is not None and ev.c_emp > args.max_c:
        return 1
    return 0


def cmd_transform(args) -> int:
    try:
        s = hardy.build_scheme(args.k, args.W, args.lam, args.c0, args.order_rule)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc))
    logw2 = math.log(args.W) ** 2
    rows = []
    for j in range(s.J):
        diff = hardy.transform_check(s, j)
        rows.append({"j": j, "H": s.orders[j], "points": s.lattice_count(j),
                     "diff": diff, "ratio": diff / logw2})
    worst = max(r["ratio"] for r in rows)
    _emit_json({"k": args.k, "W": args.W, "J": s.J, "intervals": rows, "max_ratio": worst}, args.output)
    if args.max_ratio is not None and worst > args.max_ratio:
        return 1
    return 0


def cmd_vaaler(args) -> int:
    rng = np.random.default_rng(args.seed)
    result = {}
    for H in args.H:
        if H < 2:
            raise UsageError("orders must be >= 2")
        w = rng.uniform(-args.span, args.span, args.samples)
        result[str(H)] = vaaler.majorant_violations(H, w)
    _emit_json({"samples": args.samples, "violations": result}, args.output)
    return 1 if any(result.values()) else 0


def cmd_classify(args) -> int:
    try:
        v = analysis.classify_exponent(BodyParams(args.m, args.k))
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit_json(v._asdict(), args.output)
    return 0


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lamelattice",
                                 description="Lattice points in |u1|^mk + (|u2|^k + |u3|^k)^m <= x^mk.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, body=True):
        if body:
            sp.add_argument("--m", type=float, required=True)
            sp.add_argument("--k", type=float, required=True)
        sp.add_argument("--policy", choices=("auto", "exact", "float"), default="auto")
        sp.add_argument("--guard-eps", type=float, default=1e-9)
        sp.add_argument("--n-max", default="full", help="sine-series terms, or 'full'")
        sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("count", help="A_{m,k}(x)")
    common(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--method", choices=("sliced", "bruteforce"), default="sliced")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("disc", help="one discrepancy record (JSON by default)")
    common(sp)
    sp.add_argument("--format", choices=("json", "csv"), default=None)
    sp.add_argument("--x", type=float, required=True)
    sp.set_defaults(func=cmd_disc)

    sp = sub.add_parser("sweep", help="discrepancy records over a grid (CSV by default)")
    common(sp)
    sp.add_argument("--format", choices=("csv", "json"), default=None)
    sp.add_argument("--grid", help="comma separated, strictly increasing")
    sp.add_argument("--x-min", type=float)
    sp.add_argument("--x-max", type=float)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--spacing", choices=("lin", "log"), default="lin")
    sp.add_argument("--workers", type=int, default=None,
                    help=f"worker processes (default ${WORKERS_ENV} or CPU count)")
    sp.set_defaults(func=cmd_sweep)

    def scheme_args(sp, lam):
        sp.add_argument("--k", type=float, required=True)
        sp.add_argument("--W", type=float, required=True)
        sp.add_argument("--lambda", dest="lam", type=float, default=lam)
        sp.add_argument("--c0", type=float, default=1.0)
        sp.add_argument("--order-rule", choices=sorted(hardy.ORDER_RULES), default="constant")
        sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("hardy", help="truncated Hardy identity report")
    scheme_args(sp, 0.47)
    sp.add_argument("--selector", default="-imag,real",
                    help="parts taken of the alpha and beta sums, e.g. '-imag,real'")
    sp.add_argument("--max-c", type=float, default=None, help="fail if C_emp exceeds this")
    sp.set_defaults(func=cmd_hardy)

    sp = sub.add_parser("transform", help="dyadic transform check per interval")
    scheme_args(sp, 0.0)
    sp.add_argument("--max-ratio", type=float, default=None,
                    help="fail if max diff/(log W)^2 exceeds this")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("vaaler", help="sawtooth approximation bound on random points")
    sp.add_argument("--H", type=int, nargs="+", default=[2, 3, 5, 8, 16, 64, 256])
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--span", type=float, default=10.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_vaaler)

    sp = sub.add_parser("classify", help="remainder exponent case as JSON")
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_classify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "n_max", "full") != "full":
        try:
            if int(args.n_max) < 0:
                raise ValueError
        except ValueError:
            parser.print_usage(sys.stderr)
            print(f"lamelattice: error: bad --n-max {args.n_max!r}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lamelattice: error: {exc}", file=sys.stderr)
        return 2
    except AmbiguityError as exc:
        print(f"lamelattice: {exc}", file=sys.stderr)
        return 1


run = main


if __name__ == "__main__":
    sys.exit(main())
