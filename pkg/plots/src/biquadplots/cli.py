"""Command line for rendering one figure from a simulation CSV log."""
from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, PlotError, plot


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biquadplot",
        description="Render a figure from a bi-quadcopter simulation CSV log")
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure kind")
    parser.add_argument("input_csv", help="simulation log (CSV with header)")
    parser.add_argument("output", help="image file to write")
    parser.add_argument("--format", choices=("png", "svg"), default=None,
                        help="image format (default: from the output suffix)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, input_csv=args.input_csv,
                          output_path=args.output, fmt=args.format)
        path = plot(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
