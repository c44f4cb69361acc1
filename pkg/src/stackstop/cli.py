"""Command-line interface.

    stackstop solve --n 50
    stackstop near-opt --n 50
    stackstop asymptotic --bounds
    stackstop oracle --n 4
    stackstop simulate --n 50 --trials 100000 --seed 1
    stackstop tables --which equilibria --format csv

Exit status: 0 on success, 2 on invalid input, 1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

SCHEMA_VERSION = 1
EQUILIBRIA_N = (3, 4, 5, 6, 7, 8, 9, 10, 20)


class UsageError(Exception):
    pass


def _round(x, precision: int):
    """Round half-even to ``precision`` decimals.

    Magnitudes below 1e-3 keep ``precision`` significant digits instead, so
    small error bounds do not collapse to zero.
    """
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        d = Decimal(repr(float(x)))
    if d.is_nan() or d.is_infinite():
        raise ValueError("non-finite number in output")
    if d != 0 and abs(d) < Decimal("1e-3"):
        exp = d.adjusted() - precision + 1
    else:
        exp = -precision
    return float(d.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_EVEN))


def _clean(obj, precision: int):
    """Round every number to ``precision`` decimals; ints and bools pass through."""
    if isinstance(obj, bool) or isinstance(obj, int) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (float, Fraction)):
        return _round(obj, precision)
    if isinstance(obj, dict):
        return {k: _clean(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, precision) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item(), precision)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fraction_str(x) -> str:
    return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else repr(x)


# ---- commands -------------------------------------------------------------


def _n(args, lo=3, hi=500):
    if args.n is None:
        raise UsageError("--n is required")
    if not lo <= args.n <= hi:
        raise UsageError(f"--n must lie in {lo}..{hi}")
    return args.n


def cmd_solve(args):
    from .response import solve_game

    sol = solve_game(_n(args), exact=args.exact)
    return {"game": sol.to_dict()}, [{"n": r["n"], "q": r["q"]} for r in sol.to_dict()["q_table"]]


def cmd_near_opt(args):
    from .near_optimal import solve_near_optimal

    sol = solve_near_optimal(_n(args), exact=args.exact)
    d = sol.to_dict()
    return {"near_optimal": d}, d["n_m"]


def cmd_asymptotic(args):
    from .asymptotic import MAX_MEMORY, bounds_table, lower_bound, threshold, upper_bound

    ub = upper_bound()
    if args.k is not None:
        if not 0 <= args.k <= MAX_MEMORY:
            raise UsageError(f"--k must lie in 0..{MAX_MEMORY}")
        lb = lower_bound(args.k)
        out = {"k": args.k, "t0": lb.t0, "thresholds": list(lb.thresholds), "pre_constant": lb.pre_constant}
        return {"lower_bound": out}, [{"m": m, "t": t} for m, t in enumerate(lb.thresholds, 1)]
    table = bounds_table()
    payload = {
        "upper_bound": ub.t0,
        "lower_bounds": {str(r["k"]): r["lower_bound"] for r in table},
        "truncation_bounds": {str(r["k"]): r["truncation_bound"] for r in table},
    }
    if not args.bounds:
        payload["t1"] = threshold(1)
        payload["upper_bound_constants"] = ub.to_dict()
    return payload, table


def _p2_rule(name: str, N: int):
    from .near_optimal import solve_near_optimal
    from .response import solve_game
    from .rules import p2_fixed, p2_near_optimal, p2_optimal
    from .classical import p1_threshold_index

    if name in ("pi1", "pi2", "pi3"):
        return p2_fixed(name, N, p1_threshold_index(N))
    if name == "optimal":
        return p2_optimal(solve_game(N, summary=False))
    if name == "near-optimal":
        return p2_near_optimal(solve_near_optimal(N))
    raise UsageError(f"unknown strategy {name!r}")


def cmd_oracle(args):
    from .classical import p1_threshold_index
    from .oracle import enumerate_exact
    from .rules import p1_threshold

    N = _n(args, 3, 12)
    names = args.p2 or ["pi1", "pi2", "pi3", "optimal"]
    rows = []
    for name in names:
        u1, u2 = enumerate_exact(N, p1_threshold(p1_threshold_index(N)), _p2_rule(name, N))
        rows.append({"strategy": name, "u1": _fraction_str(u1), "u2": _fraction_str(u2),
                     "u1_decimal": u1, "u2_decimal": u2})
    return {"n": N, "results": rows}, rows


def cmd_simulate(args):
    from .classical import p1_threshold_index
    from .oracle import simulate
    from .rules import p1_threshold

    N = _n(args, 3, 10_000)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.shards < 1:
        raise UsageError("--shards must be >= 1")
    name = (args.p2 or ["optimal"])[0]
    rep = simulate(N, p1_threshold(p1_threshold_index(N)), _p2_rule(name, N), args.trials, args.seed, args.shards)
    d = rep.to_dict()
    d["p2_strategy"] = name
    return {"simulation": d}, [d]


def _table(args):
    from . import asymptotic as asy
    from .oracle import table1_rows
    from .posterior import posterior_from_history
    from .response import solve_game

    which = args.which
    if which == "table1":
        rows = [{**{f"n{i + 1}": s for i, s in enumerate(r["sequence"])}, "pi1": r["pi1"], "pi2": r["pi2"], "pi3": r["pi3"]}
                for r in table1_rows(4)]
        totals = {k: Fraction(sum(r[k] for r in rows), len(rows)) for k in ("pi1", "pi2", "pi3")}
        return {"rows": rows, "expected": {k: _fraction_str(v) for k, v in totals.items()}}, rows
    if which == "equilibria":
        rows = []
        for N in EQUILIBRIA_N:
            s = solve_game(N, summary=False)
            rows.append({"n": N, "n_star": s.n_star, "u1": s.u1, "n0": s.n0, "n1": s.n1, "u2": s.u2})
        return {"rows": rows}, rows
    if which == "q":
        N = _n(args)
        s = solve_game(N, summary=False)
        rows = [{"n": n, "q": q} for n, q in sorted(s.q_table.items())]
        return {"n": N, "rows": rows}, rows
    if which == "posterior":
        N = _n(args)
        s = solve_game(N, summary=False)
        ns = s.n_star
        last = min(ns + 5, N)
        rows = []
        for m1 in range(ns + 1, last):
            for m2 in range(m1 + 1, last + 1):
                rows.append({"mu1": m1, "mu2": m2, "p": posterior_from_history((m1, m2), n_star=ns)})
        return {"n": N, "rows": rows}, rows
    if which == "thresholds-asymptotic":
        rows = [{"m": m, "t": t} for m, t in asy.threshold_table().items()]
        return {"rows": rows}, rows
    if which == "bounds":
        rows = asy.bounds_table()
        return {"rows": rows, "upper_bound": asy.upper_bound().t0}, rows
    raise UsageError(f"unknown table {which!r}")


def cmd_tables(args):
    payload, rows = _table(args)
    payload = {"table": args.which, **payload}
    return payload, rows


COMMANDS = {
    "solve": cmd_solve,
    "near-opt": cmd_near_opt,
    "asymptotic": cmd_asymptotic,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
    "tables": cmd_tables,
}

TABLES = ("table1", "equilibria", "q", "posterior", "thresholds-asymptotic", "bounds")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", type=int, default=6, help="decimal places (default 6)")
    common.add_argument("--out", dest="out_path", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="stackstop", description="Two-player secretary game solvers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="optimal response and values for N objects")
    s.add_argument("--n", type=int)
    s.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None,
                   help="rational arithmetic (default: only for N <= 12)")

    s = sub.add_parser("near-opt", parents=[common], help="count-based near-optimal rule")
    s.add_argument("--n", type=int)
    s.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None)

    s = sub.add_parser("asymptotic", parents=[common], help="large-N thresholds and bounds")
    s.add_argument("--bounds", action="store_true", help="only the value bounds")
    s.add_argument("--k", type=int, help="details of the memory-k lower bound")

    s = sub.add_parser("oracle", parents=[common], help="exact expectations by enumeration")
    s.add_argument("--n", type=int)
    s.add_argument("--p2", action="append", choices=("pi1", "pi2", "pi3", "optimal", "near-optimal"))

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate")
    s.add_argument("--n", type=int)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--p2", action="append", choices=("pi1", "pi2", "pi3", "optimal", "near-optimal"))

    s = sub.add_parser("tables", parents=[common], help="reproduce a reference table")
    s.add_argument("--which", choices=TABLES, required=True)
    s.add_argument("--n", type=int, default=50)
    return p


def render(payload, rows, fmt: str, precision: int) -> str:
    if fmt == "json":
        body = {"schema_version": SCHEMA_VERSION, **_clean(payload, precision)}
        return json.dumps(body, indent=2) + "\n"
    rows = _clean(rows, precision)
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".stackstop-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not 0 <= args.precision <= 15:
            raise UsageError("--precision must lie in 0..15")
        payload, rows = COMMANDS[args.command](args)
        text = render(payload, rows, args.format, args.precision)
    except (UsageError, ValueError) as exc:
        print(f"stackstop: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"stackstop: internal error: {exc!r}", file=sys.stderr)
        return 1
    if args.out_path:
        write_atomic(args.out_path, text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
