"""Command line front end: one figure per invocation.

Exit codes: 0 success, 2 bad arguments / missing input / schema mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys

from .figures import KINDS, FigureSpec, plot_convergence, plot_ratio_table, plot_solution

_BUILDERS = {
    "solution-overlay": plot_solution,
    "convergence": plot_convergence,
    "ratio-table": plot_ratio_table,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relmc-plots",
        description="Render figures from solver CSV artifacts.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input", help="snapshot or error-report CSV")
    parser.add_argument("-o", "--output", required=True, help="image file path")
    parser.add_argument("--reference", help="reference snapshot CSV")
    parser.add_argument("--initial", help="initial-datum snapshot CSV")
    parser.add_argument("--inset", action="store_true",
                        help="add the derivative-histogram inset")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--xlabel", default="x")
    parser.add_argument("--ylabel", default="u")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not os.path.exists(args.input):
        print(f"error: input file {args.input} not found", file=sys.stderr)
        return 2
    spec = FigureSpec(
        input=args.input, output=args.output, kind=args.kind,
        reference=args.reference, initial=args.initial, inset=args.inset,
        xlabel=args.xlabel, ylabel=args.ylabel, dpi=args.dpi)
    try:
        path = _BUILDERS[args.kind](spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
