#!/usr/bin/env python3
"""Sweep churn/resync settings and report steady-state lag-bucket bands.

This is the experiment behind configs/calibrated.json: the chosen setting
(churn 8 toggles per node-hour, 180 s per catch-up block, outdegree 8,
fetch limit 1) keeps the mean up-to-date fraction near 0.5 and the 1-4
blocks-behind fraction near 0.3.

Usage: python scripts/calibrate_consensus.py [--seeds 4]
"""

import argparse

from partsim.simulation import SimParams, build_sim_nodes, run
from partsim.topology import TopologyParams, build_synthetic

WARMUP = 14_400.0

GRID = [
    {"churn_rate": 6.0, "resync_seconds_per_block": 180.0},
    {"churn_rate": 8.0, "resync_seconds_per_block": 180.0},
    {"churn_rate": 8.0, "resync_seconds_per_block": 200.0},
    {"churn_rate": 10.0, "resync_seconds_per_block": 180.0},
]


def bands(seeds: int, **overrides) -> tuple[float, float]:
    snap = build_synthetic(TopologyParams(600, 40, 1.0, seed=1))
    b0_means, b12_means = [], []
    for seed in range(seeds):
        params = SimParams(horizon=86_400.0, seed=seed, sample_interval=600.0, **overrides)
        trace = run(build_sim_nodes(snap), params)
        samples = [r for r in trace.samples() if r["t"] >= WARMUP]
        b0_means.append(sum(r["b0"] for r in samples) / len(samples))
        b12_means.append(sum(r["b1"] + r["b2"] for r in samples) / len(samples))
    return sum(b0_means) / seeds, sum(b12_means) / seeds


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=4)
    args = parser.parse_args()
    print("churn  resync   B0-mean  B1+B2-mean")
    for overrides in GRID:
        b0, b12 = bands(args.seeds, **overrides)
        print(
            f"{overrides['churn_rate']:5.1f}  {overrides['resync_seconds_per_block']:6.0f}"
            f"  {b0:7.3f}  {b12:10.3f}"
        )


if __name__ == "__main__":
    main()
