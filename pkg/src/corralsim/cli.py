"""Command-line interface.

Subcommands:
  run     one experiment config: Monte-Carlo repetitions, trace + summary CSVs
  sweep   every base of a config run alone (plus nothing else): summary CSV
  oracle  print independently derived reference values used by the test suite

Exit codes: 0 success, 2 configuration error, 3 runtime invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

from .config import load_config
from .errors import ConfigError, InvariantViolation
from .harness import (
    run_monte_carlo,
    write_audit_csv,
    write_summary_csv,
    write_trace_csv,
)


def _apply_overrides(config, args):
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.reps is not None:
        config = replace(config, n_reps=args.reps)
    if args.audit_term2:
        config = replace(config, audit_term2=True)
    if args.no_drop_test:
        config = replace(config, drop_test=False)
    return config


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    os.makedirs(args.out, exist_ok=True)
    collect = args.trace != "none"
    stats = run_monte_carlo(config, n_jobs=args.jobs, collect_trace=collect)
    if collect:
        write_trace_csv(os.path.join(args.out, f"{config.label}_trace.csv"), stats.records)
    if config.audit_term2:
        write_audit_csv(os.path.join(args.out, f"{config.label}_audit.csv"), stats.records)
    write_summary_csv(os.path.join(args.out, f"{config.label}_summary.csv"), [stats])
    print(f"{config.label}: final regret mean {stats.final_mean:.3f} over "
          f"{config.n_reps} reps -> {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    all_stats = []
    for idx, spec in enumerate(config.bases):
        single = replace(config,
                         master=replace(config.master, kind="single", base_index=idx),
                         label=spec.name())
        all_stats.append(run_monte_carlo(single, n_jobs=args.jobs))
        print(f"{spec.name()}: final regret mean {all_stats[-1].final_mean:.3f}")
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep_summary.csv")
    write_summary_csv(path, all_stats)
    print(f"wrote {path}")
    return 0


def _cmd_oracle(args) -> int:
    golden = (3.0 - math.sqrt(5.0)) / 2.0
    print("log-barrier update, p=[1/2,1/2], eta=[1,1], loss=[1,0]:")
    print(f"  lambda      = (3 - sqrt 5)/2 = {golden:.12f}")
    print(f"  new p       = [{1.0 / (3.0 - golden):.12f}, {1.0 / (2.0 - golden):.12f}]")
    thresh = 10.0 + 2.0 * math.sqrt(200.0 * math.log(1.6e9))
    print("drop-test threshold, l=100, T=1e4, M=4, delta=1e-4, coeff=1, alpha=1/2:")
    print(f"  U(100) + 2 sqrt(2 l ln(4TM/delta)) = {thresh:.12f}")
    idx = 0.5 + math.sqrt(2.0 * math.log(1e9) / 100.0)
    print("ucb index, mean 0.5, n=100, t=1000:")
    print(f"  0.5 + sqrt(2 ln(1e9)/100) = {idx:.12f}")
    print("log-log slopes of c*t^a: a exactly (1.0, 0.5, 2/3 for the synthetic checks)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corralsim",
                                     description="bandit model-selection simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--reps", type=int)
    run_p.add_argument("--audit-term2", action="store_true")
    run_p.add_argument("--no-drop-test", action="store_true")
    run_p.add_argument("--trace", choices=["full", "none"], default="full")
    run_p.add_argument("--jobs", type=int, default=None)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run every base of the config alone")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--seed", type=int)
    sweep_p.add_argument("--reps", type=int)
    sweep_p.add_argument("--audit-term2", action="store_true")
    sweep_p.add_argument("--no-drop-test", action="store_true")
    sweep_p.add_argument("--jobs", type=int, default=None)
    sweep_p.set_defaults(func=_cmd_sweep)

    oracle_p = sub.add_parser("oracle", help="print reference oracle values")
    oracle_p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
