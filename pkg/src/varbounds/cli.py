"""Command-line front end.

Exit codes: 0 success / feasible, 1 infeasible verdict (or a failed bound
check), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from ._validation import InputError, check_values
from .audit import (
    DispersionKind,
    ReportedSummary,
    Verdict,
    audit_member,
    audit_order_statistic,
    audit_subset,
    audit_summary,
)
from .bounds import REL_TOL, SubsetSummary
from .catalog import bound_catalog
from .harness import MergePlan, Topology, order_invariance_trial
from .moments import from_values

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


# -- input -------------------------------------------------------------------


def parse_numbers(text: str) -> np.ndarray:
    """Whitespace/newline separated numbers; lines starting with ``#`` are skipped."""
    tokens = []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            continue
        tokens.extend(line.split())
    values = []
    for i, tok in enumerate(tokens):
        try:
            values.append(float(tok))
        except ValueError:
            raise InputError(f"value #{i + 1} is not a number: {tok!r}") from None
    return check_values(values, "input")


def parse_csv_column(text: str, column: str) -> np.ndarray:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or column not in reader.fieldnames:
        raise InputError(f"column {column!r} not found in CSV header")
    values = []
    for row_no, row in enumerate(reader, start=2):
        cell = (row.get(column) or "").strip()
        if not cell:
            continue
        try:
            values.append(float(cell))
        except ValueError:
            raise InputError(f"line {row_no}: {cell!r} is not a number") from None
    return check_values(values, column)


def _read_input(args) -> np.ndarray:
    if args.path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.path}: {exc.strerror}") from None
    if args.csv:
        if not args.column:
            raise InputError("--csv needs --column NAME")
        values = parse_csv_column(text, args.column)
    else:
        values = parse_numbers(text)
    if values.size == 0:
        raise InputError("no values in input")
    return values


def _report(args) -> ReportedSummary:
    if (args.sd is None) == (args.var is None):
        raise InputError("give exactly one of --sd or --var")
    is_sd = args.sd is not None
    kind = args.kind or ("sample" if is_sd else "population")
    dispersion_kind = DispersionKind(f"{kind}_{'sd' if is_sd else 'variance'}")
    return ReportedSummary(
        n=args.n,
        mean=args.mean,
        dispersion=args.sd if is_sd else args.var,
        dispersion_kind=dispersion_kind,
        min=args.min,
        max=args.max,
        decimals=args.decimals,
    )


# -- output ------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


def _emit(obj: dict, as_json: bool, lines: Sequence[str]) -> None:
    # assemble everything first so output lands in one write
    text = json.dumps(obj, indent=2) if as_json else "\n".join(lines)
    sys.stdout.write(text + "\n")


def _emit_verdict(verdict: Verdict, args) -> int:
    lines = [verdict.message]
    for v in verdict.violations:
        r = v.result
        lines.append(
            f"  {v.constraint}: bound={_fmt(r.bound)} observed={_fmt(r.observed)} slack={_fmt(r.slack)}"
        )
    _emit(verdict.to_dict(), args.json, lines)
    return EXIT_OK if verdict.feasible else EXIT_INFEASIBLE


# -- subcommands -------------------------------------------------------------


def cmd_stats(args) -> int:
    xs = _read_input(args)
    acc = from_values(xs)
    out = {
        "n": acc.count,
        "mean": acc.mean,
        "population_variance": acc.population_variance,
        "sample_variance": acc.sample_variance if acc.count >= 2 else None,
        "min": float(xs.min()),
        "max": float(xs.max()),
    }
    _emit(out, args.json, [f"{k}: {_fmt(v)}" for k, v in out.items()])
    return EXIT_OK


def cmd_bounds(args) -> int:
    xs = _read_input(args)
    rows = bound_catalog(xs, rel_tol=args.tolerance)
    acc = from_values(xs)
    out = {"n": acc.count, "variance": acc.population_variance, "bounds": rows}
    lines = [f"n={acc.count} population variance={_fmt(acc.population_variance)}"]
    lines.append(f"{'bound':<22}{'value':>24}{'observed':>14}{'slack':>14}  ok")
    for row in rows:
        if not row["applicable"]:
            lines.append(f"{row['name']:<22}{'n/a':>24}")
            continue
        value = row["bound"] if "bound" in row else f"[{_fmt(row['lo'])}, {_fmt(row['hi'])}]"
        lines.append(
            f"{row['name']:<22}{_fmt(value):>24}{_fmt(row['observed']):>14}"
            f"{_fmt(row['slack']):>14}  {_fmt(row['satisfied'])}"
        )
    _emit(out, args.json, lines)
    ok = all(row["satisfied"] for row in rows if row["applicable"])
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_check(args) -> int:
    verdict = audit_summary(_report(args), range_attained=not args.range_not_attained, rel_tol=args.tolerance)
    return _emit_verdict(verdict, args)


def cmd_member(args) -> int:
    return _emit_verdict(audit_member(args.x, _report(args), rel_tol=args.tolerance), args)


def cmd_subset(args) -> int:
    by_mean = args.r is not None or args.gamma is not None
    by_var = args.m is not None or args.subvar is not None
    if by_mean == by_var:
        raise InputError("give either --r/--gamma or --m/--subvar")
    if by_mean:
        if args.r is None or args.gamma is None:
            raise InputError("--r and --gamma go together")
        sub = SubsetSummary(args.r, mean=args.gamma)
    else:
        if args.m is None or args.subvar is None:
            raise InputError("--m and --subvar go together")
        sub = SubsetSummary(args.m, variance=args.subvar)
    return _emit_verdict(audit_subset(sub, _report(args), rel_tol=args.tolerance), args)


def cmd_order(args) -> int:
    verdict = audit_order_statistic(args.k, args.value, _report(args), rel_tol=args.tolerance)
    return _emit_verdict(verdict, args)


def cmd_shard_sim(args) -> int:
    xs = _read_input(args)
    plan = MergePlan(args.shards, args.seed, args.topology)
    report = order_invariance_trial(
        xs, args.trials, plan.seed, shard_count=plan.shard_count, topology=plan.topology, workers=args.workers
    )
    oracle = from_values(xs)
    out = {
        "plan": {"shard_count": plan.shard_count, "seed": plan.seed, "topology": plan.topology.value},
        "oracle": oracle.to_dict(),
        "population_variance": oracle.population_variance,
        "report": report.to_dict(),
    }
    lines = [
        f"shards={plan.shard_count} trials={report.trials} topology={plan.topology.value} seed={plan.seed}",
        f"oracle: n={oracle.count} mean={_fmt(oracle.mean)} population variance={_fmt(oracle.population_variance)}",
        f"max mean rel error: {report.mean_rel_error:.3g}",
        f"max m2 rel error:   {report.m2_rel_error:.3g}",
        f"m2 spread:          {report.spread:.3g}",
    ]
    _emit(out, args.json, lines)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _finite_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return x


def _positive_float(text: str) -> float:
    x = _finite_float(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument(
        "--tolerance", type=_positive_float, default=argparse.SUPPRESS, metavar="REL",
        help=f"relative tolerance for bound checks (default {REL_TOL:g})",
    )

    data = _Parser(add_help=False)
    data.add_argument("path", nargs="?", help="input file (default: standard input)")
    data.add_argument("--csv", action="store_true", help="read a headered CSV file")
    data.add_argument("--column", help="CSV column to use with --csv")

    summary = _Parser(add_help=False)
    g = summary.add_argument_group("reported summary")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--mean", type=_finite_float, required=True)
    g.add_argument("--sd", type=_positive_float, help="standard deviation (kind defaults to sample)")
    g.add_argument("--var", type=_positive_float, help="variance (kind defaults to population)")
    g.add_argument("--kind", choices=["population", "sample"], help="convention of --sd/--var")
    g.add_argument("--min", type=_finite_float)
    g.add_argument("--max", type=_finite_float)
    g.add_argument("--decimals", type=int, help="reported rounding precision")

    parser = _Parser(prog="varbounds", description="Moment statistics, variance bounds and feasibility audits.")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--tolerance", type=_positive_float, default=REL_TOL, metavar="REL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", parents=[common, data], help="n, mean, variances, range")
    p.set_defaults(func=cmd_stats)
    p = sub.add_parser("bounds", parents=[common, data], help="catalogue of every applicable bound")
    p.set_defaults(func=cmd_bounds)
    p = sub.add_parser("check", parents=[common, summary], help="audit a reported summary")
    p.add_argument("--range-not-attained", action="store_true",
                   help="min/max are limits, not observed values (skips range-based checks)")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("member", parents=[common, summary], help="could X be an observation?")
    p.add_argument("--x", type=_finite_float, required=True)
    p.set_defaults(func=cmd_member)
    p = sub.add_parser("subset", parents=[common, summary], help="audit a subset mean or variance")
    p.add_argument("--r", type=int, help="subset size for --gamma")
    p.add_argument("--gamma", type=_finite_float, help="subset mean")
    p.add_argument("--m", type=int, help="subset size for --subvar")
    p.add_argument("--subvar", type=_positive_float, help="subset population variance")
    p.set_defaults(func=cmd_subset)
    p = sub.add_parser("order", parents=[common, summary], help="audit the k-th smallest value")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--value", type=_finite_float, required=True)
    p.set_defaults(func=cmd_order)
    p = sub.add_parser("shard-sim", parents=[common, data], help="sharded merge drift simulation")
    p.add_argument("--shards", type=int, default=8)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--topology", choices=[t.value for t in Topology], default=Topology.RANDOM_TREE.value)
    p.add_argument("--workers", type=int, default=None, help="threads for per-shard accumulation")
    p.set_defaults(func=cmd_shard_sim)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (InputError, ValueError, OverflowError) as exc:
        sys.stderr.write(f"varbounds: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
