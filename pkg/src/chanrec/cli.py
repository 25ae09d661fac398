"""Command-line front end.

Subcommands: ``assign`` (run a heuristic scheme), ``eval`` (recovery capacity
and feasibility of a given assignment), ``oracle`` (exact branch-and-bound),
``study`` (batch experiments to CSV plus a JSON summary).

Exit codes: 0 on success, 2 on usage or input format errors, 3 when an exact
solve exhausts its node budget and --strict was given.

All report output uses fixed 9-decimal floats so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from .assign import edge_color, greedy_assign, ifa_assign, random_assign, serialize_edge_coloring
from .experiments import (
    DEFAULT_MASTER_SEED,
    run_gap_study,
    run_scaling_study,
    run_traffic_study,
    write_records_csv,
)
from .metrics import ODDSET_EXACT_CAP, feasibility_ratio, recovery_capacity
from .netmodel import (
    FormatError,
    parse_assignment,
    parse_network,
    serialize_assignment,
)
from .oracles import (
    DEFAULT_LEAF_BUDGET,
    solve_feasi_exact,
    solve_whiterec_exact,
    solve_whiterecinf_exact,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _render(obj, indent: int = 0) -> str:
    """JSON with insertion-order keys and fixed-precision floats."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {_render(v, indent + 2)}"
            for k, v in obj.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(f"{pad}  {_render(v, indent + 2)}" for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format(obj, ".9f")
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    raise TypeError(f"cannot render {type(obj)!r}")


def _write_out(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_network(path: str):
    with open(path) as fh:
        return parse_network(fh.read())


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _cmd_assign(args: argparse.Namespace) -> int:
    net = _load_network(args.net)
    if args.alg == "greedy":
        y = greedy_assign(net)
    elif args.alg == "ifa":
        y = ifa_assign(net)
        if args.colors_out:
            _write_out(serialize_edge_coloring(edge_color(net)), args.colors_out)
    else:
        y = random_assign(net, args.seed)
    _write_out(serialize_assignment(y, net), args.out)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    net = _load_network(args.net)
    with open(args.assignment) as fh:
        y = parse_assignment(fh.read(), net)
    mode = args.mode
    if mode == "auto":
        mode = "exact" if net.n_nodes <= args.oddset_cap else "bracket"
    rec = recovery_capacity(net, y, args.k, mode=mode, oddset_exact_cap=args.oddset_cap)
    feas = feasibility_ratio(net, y, mode=mode, oddset_exact_cap=args.oddset_cap)
    report = rec.to_json_dict()
    report.update(feas.to_json_dict())
    _write_out(_render(report) + "\n", args.out)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    net = _load_network(args.net)
    if args.problem == "whiterec":
        result = solve_whiterec_exact(net, args.k, limit=args.budget)
    elif args.problem == "whiterecinf":
        result = solve_whiterecinf_exact(net, args.k, limit=args.budget)
    else:
        result = solve_feasi_exact(net, limit=args.budget)
    _write_out(_render(result.to_json_dict(net)) + "\n", args.out)
    if args.strict and not result.proven_optimal:
        print("budget exhausted before optimality was proven", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_study(args: argparse.Namespace) -> int:
    overrides = {}
    if args.degree_cap is not None:
        overrides["degree_cap"] = args.degree_cap
    if args.edge_prob is not None:
        overrides["edge_prob"] = args.edge_prob
    if args.capacity_range is not None:
        overrides["capacity_range"] = tuple(args.capacity_range)
    if args.demand_range is not None:
        overrides["demand_range"] = tuple(args.demand_range)

    if args.kind == "scaling":
        records, summary = run_scaling_study(
            sizes=args.sizes,
            channel_counts=args.channels,
            k=args.k,
            trials=args.trials,
            seed=args.seed,
            demand=args.uniform_demand,
            jobs=args.jobs,
        )
    elif args.kind == "gap":
        records, summary = run_gap_study(
            sizes=args.sizes,
            channel_counts=args.channels,
            k_values=args.k_values,
            trials=args.trials,
            seed=args.seed,
            budget=args.budget,
            jobs=args.jobs,
            spec_overrides=overrides or None,
        )
    else:
        records, summary = run_traffic_study(
            sizes=args.sizes,
            channel_counts=args.channels,
            trials=args.trials,
            seed=args.seed,
            budget=args.budget,
            jobs=args.jobs,
            spec_overrides=overrides or None,
        )
    if args.out:
        write_records_csv(records, args.out)
    if args.summary:
        _write_out(_render(summary) + "\n", args.summary)
    if not args.out and not args.summary:
        _write_out(_render(summary) + "\n", None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chanrec",
        description="White-channel assignment and preemption recovery analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_assign = sub.add_parser("assign", help="run an assignment scheme")
    p_assign.add_argument("--net", required=True, help="network JSON file")
    p_assign.add_argument(
        "--alg", required=True, choices=("greedy", "ifa", "random")
    )
    p_assign.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p_assign.add_argument("--out", default=None, help="output file (default stdout)")
    p_assign.add_argument(
        "--colors-out",
        default=None,
        help="with --alg ifa, also write the edge coloring here",
    )
    p_assign.set_defaults(fn=_cmd_assign)

    p_eval = sub.add_parser("eval", help="evaluate an assignment")
    p_eval.add_argument("--net", required=True)
    p_eval.add_argument("--assignment", required=True)
    p_eval.add_argument("--k", type=_positive_int, default=1)
    p_eval.add_argument("--mode", choices=("auto", "exact", "bracket"), default="auto")
    p_eval.add_argument("--oddset-cap", type=_positive_int, default=ODDSET_EXACT_CAP)
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(fn=_cmd_eval)

    p_oracle = sub.add_parser("oracle", help="exact solve by branch and bound")
    p_oracle.add_argument("--net", required=True)
    p_oracle.add_argument(
        "--problem", required=True, choices=("whiterec", "whiterecinf", "feasi")
    )
    p_oracle.add_argument("--k", type=_positive_int, default=1)
    p_oracle.add_argument("--budget", type=_positive_int, default=DEFAULT_LEAF_BUDGET)
    p_oracle.add_argument(
        "--strict",
        action="store_true",
        help="exit 3 if the budget runs out before optimality is proven",
    )
    p_oracle.add_argument("--out", default=None)
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_study = sub.add_parser("study", help="batch experiments")
    p_study.add_argument("--kind", required=True, choices=("scaling", "gap", "traffic"))
    p_study.add_argument("--sizes", type=_int_list, required=True)
    p_study.add_argument("--channels", type=_int_list, required=True)
    p_study.add_argument("--k", type=_positive_int, default=2, help="scaling only")
    p_study.add_argument(
        "--k-values", type=_int_list, default=[1], help="gap study only"
    )
    p_study.add_argument("--trials", type=_positive_int, default=10)
    p_study.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p_study.add_argument("--budget", type=_positive_int, default=300_000)
    p_study.add_argument("--jobs", type=_positive_int, default=1)
    p_study.add_argument("--uniform-demand", type=float, default=None)
    p_study.add_argument("--degree-cap", type=int, default=None)
    p_study.add_argument("--edge-prob", type=float, default=None)
    p_study.add_argument("--capacity-range", type=float, nargs=2, default=None)
    p_study.add_argument("--demand-range", type=float, nargs=2, default=None)
    p_study.add_argument("--out", default=None, help="CSV output path")
    p_study.add_argument("--summary", default=None, help="JSON summary path")
    p_study.set_defaults(fn=_cmd_study)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
