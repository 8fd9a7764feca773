#!/usr/bin/env python3
"""Smaller diagnostic experiments: rate check, smoothing decay, drop-test
calibration, and the misspecified-linear grid.  One summary CSV each."""

import argparse
import os
import time

import numpy as np

from corralsim import run_monte_carlo, sublinearity_slope, write_summary_csv
from corralsim.experiments import (
    drop_calibration_configs,
    misspec_grid_configs,
    rate_check_config,
    smoothing_decay_config,
)


def run_and_write(configs, path, jobs):
    all_stats = []
    for cfg in configs:
        t0 = time.time()
        stats = run_monte_carlo(cfg, n_jobs=jobs)
        all_stats.append(stats)
        print(f"{cfg.label}: final mean regret {stats.final_mean:.1f} "
              f"({time.time() - t0:.0f}s)", flush=True)
    write_summary_csv(path, all_stats)
    print(f"wrote {path}")
    return all_stats


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--which", choices=["rate", "decay", "drop", "misspec", "all"],
                    default="all")
    ap.add_argument("--reps", type=int, default=None, help="override repetition count")
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    if args.which in ("rate", "all"):
        cfg = rate_check_config(n_reps=args.reps or 100)
        stats = run_and_write([cfg], os.path.join(args.out, "rate_check_summary.csv"),
                              args.jobs)[0]
        slope = sublinearity_slope(stats.mean_regret, steps=stats.checkpoint_steps)
        print(f"rate check: log-log slope {slope:.3f}")

    if args.which in ("decay", "all"):
        cfg = smoothing_decay_config(n_reps=args.reps or 500)
        stats = run_and_write([cfg], os.path.join(args.out, "smoothing_decay_summary.csv"),
                              args.jobs)[0]
        gaps = np.stack([r.step2_gaps for r in stats.records]).mean(axis=0)
        buckets = gaps.reshape(10, -1).mean(axis=1)
        print(f"step-2 regret by state-counter bucket: {np.round(buckets, 4)}")

    if args.which in ("drop", "all"):
        honest, corrupted = drop_calibration_configs(n_reps=args.reps or 200)
        stats = run_and_write([honest, corrupted],
                              os.path.join(args.out, "drop_calibration_summary.csv"),
                              args.jobs)
        false = sum(len(r.drop_events) for r in stats[0].records)
        caught = sum(bool(r.drop_events) for r in stats[1].records)
        print(f"false drops: {false}/{2 * len(stats[0].records)} base-runs; "
              f"corrupted caught in {caught}/{len(stats[1].records)} seeds")

    if args.which in ("misspec", "all"):
        run_and_write(misspec_grid_configs(n_reps=args.reps or 20),
                      os.path.join(args.out, "misspec_grid_summary.csv"), args.jobs)


if __name__ == "__main__":
    main()
