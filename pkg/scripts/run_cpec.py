"""Run the Gwadar-Kashgar reference scenario and print the trip report next to the closed-form plan."""

import argparse

from lrvsim import cpec_config, emit_trace, plan_trip_time, report, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--trace", help="write the JSONL trace here")
    args = ap.parse_args()

    cfg = cpec_config()
    plan = plan_trip_time(cfg.route.length_km, cfg.route.segment_speeds[0], cfg.breaks)
    print(f"closed form: driving {plan.driving_hours:.2f} h ({plan.driving_days:.2f} d), "
          f"total {plan.total_hours:.2f} h ({plan.total_days:.2f} d)")
    trace, metrics = run(cfg, seed=args.seed)
    print(report(metrics), end="")
    if args.trace:
        with open(args.trace, "wb") as fh:
            fh.write(emit_trace(trace))


if __name__ == "__main__":
    main()
