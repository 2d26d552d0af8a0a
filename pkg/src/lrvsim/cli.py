"""Command-line entry point: run, plan, report, validate."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import BreakPolicy, ConfigError, cpec_config_path, load_scenario
from .planning import plan_trip_time
from .report import emit_trace, metrics_from_trace, parse_trace, report
from .world import run


def _trace_format(name: str) -> str:
    return "csv" if name == "csv" else "jsonl"


def _run_one(scenario: str, seed: int | None, horizon: float | None, fmt: str):
    config = load_scenario(scenario)
    trace, metrics = run(config, seed=seed, horizon=horizon)
    return emit_trace(trace, fmt), metrics


def cmd_run(args) -> int:
    seeds = args.seed or [None]
    fmt = _trace_format(args.format)
    load_scenario(args.scenario)  # fail fast on a bad config
    jobs = [(args.scenario, s, args.horizon, fmt) for s in seeds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_one, *zip(*jobs)))
    else:
        results = [_run_one(*j) for j in jobs]
    for seed, (data, metrics) in zip(seeds, results):
        if args.output:
            out = Path(args.output)
            if len(seeds) > 1:
                out = out.with_name(f"{out.stem}.seed{seed}{out.suffix}")
            out.write_bytes(data)
        elif not args.quiet_trace:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        if args.report or args.output:
            label = "" if seed is None else f"seed {seed}\n"
            print(label + report(metrics), end="", file=sys.stderr if not args.output else sys.stdout)
    return 0


def cmd_plan(args) -> int:
    breaks = BreakPolicy(
        meals_per_day=args.meals_per_day,
        meal_hours=args.meal_hours,
        refreshments_per_day=args.refreshments_per_day,
        refreshment_hours=args.refreshment_hours,
        fuel_stops=args.fuel_stops,
        fuel_stop_hours=args.fuel_stop_hours,
    )
    plan = plan_trip_time(args.distance, args.speed, breaks)
    print(f"driving_hours {plan.driving_hours:.2f}")
    print(f"driving_days  {plan.driving_days:.2f}")
    print(f"total_hours   {plan.total_hours:.2f}")
    print(f"total_days    {plan.total_days:.2f}")
    return 0


def cmd_report(args) -> int:
    path = Path(args.trace)
    fmt = args.trace_format or ("csv" if path.suffix == ".csv" else "jsonl")
    trace = parse_trace(path.read_bytes(), fmt)
    print(report(metrics_from_trace(trace), args.format), end="")
    return 0


def cmd_validate(args) -> int:
    config = load_scenario(args.scenario)
    print(f"ok: {len(config.route.checkpoints)} checkpoints, {config.route.length_km:g} km, "
          f"{len(config.vehicles)} vehicles, {len(config.police_vans)} police vans")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrvsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write its trace")
    p.add_argument("scenario", nargs="?", default=str(cpec_config_path()), help="scenario YAML (default: CPEC reference)")
    p.add_argument("--seed", type=int, action="append", help="override the scenario seed; repeat for several runs")
    p.add_argument("--horizon", type=float, help="stop after this many simulated hours")
    p.add_argument("--output", "-o", help="trace file; with several seeds a .seedN suffix is added")
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--report", action="store_true", help="print the trip report")
    p.add_argument("--quiet-trace", action="store_true", help="do not echo the trace to stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for multi-seed runs")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plan", help="closed-form trip time with breaks")
    p.add_argument("--distance", type=float, default=2442.0, help="km")
    p.add_argument("--speed", type=float, default=50.0, help="average km/h")
    p.add_argument("--meals-per-day", type=float, default=3)
    p.add_argument("--meal-hours", type=float, default=0.5)
    p.add_argument("--refreshments-per-day", type=float, default=6)
    p.add_argument("--refreshment-hours", type=float, default=0.25)
    p.add_argument("--fuel-stops", type=int, default=5)
    p.add_argument("--fuel-stop-hours", type=float, default=0.25)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("report", help="trip metrics from a saved trace")
    p.add_argument("trace")
    p.add_argument("--trace-format", choices=["jsonl", "csv"])
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
