#!/usr/bin/env python3
"""Model selection between UCB and LinUCB, d=2, k=50 arms.

Case "linear": arm means are inner products with a hidden unit vector.
Case "nonlinear": arm means are arbitrary draws from [0, 10], features inert.
Writes <out>/ucb_linucb_<case>_summary.csv per case.
"""

import argparse
import os
import time

from corralsim import run_monte_carlo, write_summary_csv
from corralsim.experiments import ucb_linucb_configs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--case", choices=["linear", "nonlinear", "both"], default="both")
    ap.add_argument("--T", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20_240_502)
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()

    cases = ["linear", "nonlinear"] if args.case == "both" else [args.case]
    os.makedirs(args.out, exist_ok=True)
    for case in cases:
        all_stats = []
        for cfg in ucb_linucb_configs(case, T=args.T, n_reps=args.reps, seed=args.seed):
            t0 = time.time()
            stats = run_monte_carlo(cfg, n_jobs=args.jobs)
            all_stats.append(stats)
            print(f"{case}/{cfg.label}: final mean regret {stats.final_mean:.1f} "
                  f"({time.time() - t0:.0f}s)", flush=True)
        path = os.path.join(args.out, f"ucb_linucb_{case}_summary.csv")
        write_summary_csv(path, all_stats)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
