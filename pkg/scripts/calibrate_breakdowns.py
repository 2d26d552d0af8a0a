"""Breakdown rate vs reliability: empirical sampler frequency and simulated means."""

import argparse
import math

from lrvsim.agents import VehicleState, sample_breakdown
from lrvsim.config import config_from_dict
from lrvsim.engine import RandomSource
from lrvsim.world import run


def sampler_frequency(reliability, hazard, segment_km, trials, seed):
    rng = RandomSource(seed)
    v = VehicleState("v", reliability=reliability)
    return sum(sample_breakdown(v, segment_km, hazard, rng) is not None for _ in range(trials)) / trials


def simulated_mean(reliability, hazard, seeds):
    total = 0
    for s in range(seeds):
        cfg = config_from_dict({
            "seed": s, "horizon_hours": 100,
            "route": {"mode": "Grid", "checkpoints": [{"x": 0, "y": 0}, {"x": 500, "y": 0}], "segment_speeds": [50]},
            "breaks": {"meals_per_day": 0, "refreshments_per_day": 0, "fuel_stops": 0},
            "vehicles": [{"id": "v", "reliability": reliability}],
            "hazards": {"breakdown_per_km": hazard, "repair_hours": 0.5},
            "service_units": [{"id": "w", "kind": "Workshop", "km": 250}],
        })
        total += run(cfg)[1][0].breakdown_count
    return total / seeds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, default=500)
    ap.add_argument("--hazard", type=float, default=0.01)
    args = ap.parse_args()

    print("reliability  sampler  analytic  sim_mean")
    for rel in (0.0, 0.2, 0.5, 0.8, 1.0):
        f = sampler_frequency(rel, args.hazard, 100.0, args.trials, seed=1)
        a = 1 - math.exp(-(1 - rel) * args.hazard * 100)
        m = simulated_mean(rel, args.hazard / 5, args.seeds)
        print(f"{rel:11.1f}  {f:7.4f}  {a:8.4f}  {m:8.3f}")


if __name__ == "__main__":
    main()
