"""CLI: plot <summary.csv> -o <fig.png> [--log-log] [--labels a,b,...]

Exit codes: 0 success, 2 bad input (schema mismatch, unknown labels, missing file).
"""

from __future__ import annotations

import argparse
import sys

from .render import SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot",
                                     description="render regret curves from a summary CSV")
    parser.add_argument("summary", help="summary CSV (label,checkpoint_step,mean_regret,std_regret)")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    parser.add_argument("--log-log", action="store_true", help="log-scale both axes")
    parser.add_argument("--labels", help="comma-separated subset of labels to draw")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    labels = args.labels.split(",") if args.labels else None
    try:
        render(args.summary, args.out, log_axes=args.log_log, labels=labels)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
