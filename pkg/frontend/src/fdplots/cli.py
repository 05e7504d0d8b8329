"""Standalone figure renderer for fdbackhaul aggregate CSVs."""
from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, SchemaError, render, render_pair


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdbackhaul-plots",
        description="Render scheduler-comparison figures from an aggregate CSV",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--input-csv", required=True, help="aggregate CSV path")
    parser.add_argument("--axis-label", default="Number of flows", help="x axis label")
    parser.add_argument(
        "--metric",
        choices=("completed", "throughput", "both"),
        default="both",
        help="panel metric; 'both' stacks the two paper-style panels",
    )
    parser.add_argument(
        "--series",
        default="proposed-fd,proposed-hd,mqis,tdma,fdp",
        help="comma-separated scheduler names to draw",
    )
    parser.add_argument(
        "--out", required=True, help="output image base path (writes .png and .svg)"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    series = tuple(s for s in args.series.split(",") if s)
    try:
        if args.metric == "both":
            written = render_pair(args.input_csv, args.axis_label, series, args.out)
        else:
            written = render(
                FigureSpec(
                    input_csv=args.input_csv,
                    axis_label=args.axis_label,
                    metric=args.metric,
                    series=series,
                    output_image=args.out,
                )
            )
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
