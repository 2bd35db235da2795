"""Command-line entry point: run or describe a JSON experiment config."""

import argparse
import sys

from .runner import describe, run


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oucutoff",
        description="Batch experiments for cut-off numerics of "
                    "Levy-driven mean-reverting processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to the JSON experiment document")
    p_run.add_argument("--out-dir", default=None,
                       help="output root (default: $OUCUTOFF_OUT_ROOT or .)")
    p_run.add_argument("--seed-override", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)

    p_desc = sub.add_parser("describe", help="print the resolved plan only")
    p_desc.add_argument("config")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config, out_dir=args.out_dir,
                   seed_override=args.seed_override, workers=args.workers)
    return describe(args.config)


if __name__ == "__main__":
    sys.exit(main())
