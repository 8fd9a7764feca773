#!/usr/bin/env python3
"""Exploration-rate tuning experiment: 18 epsilon-greedy bases on a geometric
grid plus the master, two Bernoulli arms (0.5, 0.45).

Writes <out>/egreedy_summary.csv; render it with
    plot <out>/egreedy_summary.csv -o egreedy.png
"""

import argparse
import os
import time

from corralsim import run_monte_carlo, write_summary_csv
from corralsim.experiments import egreedy_tuning_configs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--T", type=int, default=50_000)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20_240_501)
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    all_stats = []
    for cfg in egreedy_tuning_configs(T=args.T, n_reps=args.reps, seed=args.seed):
        t0 = time.time()
        stats = run_monte_carlo(cfg, n_jobs=args.jobs)
        all_stats.append(stats)
        print(f"{cfg.label}: final mean regret {stats.final_mean:.1f} "
              f"({time.time() - t0:.0f}s)", flush=True)
    path = os.path.join(args.out, "egreedy_summary.csv")
    write_summary_csv(path, all_stats)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
