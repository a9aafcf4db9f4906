"""azplot command line: render grid files and diagnostics CSVs to PNG.

Exit codes: 0 success, 1 failure (one "error: ..." line on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .formats import FormatError, SchemaError, read_grid
from .render import PROJECTIONS, render_field, render_supnorm_series


def cmd_field(args) -> int:
    values, _t = read_grid(args.grid)
    render_field(values, args.output, projection=args.projection,
                 cmap=args.cmap, height=args.height)
    return 0


def cmd_supnorm(args) -> int:
    render_supnorm_series(args.csvs, args.output, log=args.log)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="azplot", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("field", help="render a grid file as a heatmap")
    q.add_argument("grid")
    q.add_argument("--output", "-o", required=True)
    q.add_argument("--projection", choices=PROJECTIONS, default="mollweide")
    q.add_argument("--cmap", default="RdBu_r")
    q.add_argument("--height", type=int, default=400)
    q.set_defaults(fn=cmd_field)

    q = sub.add_parser("supnorm", help="overlay sup-norm growth curves")
    q.add_argument("csvs", nargs="+")
    q.add_argument("--output", "-o", required=True)
    q.add_argument("--log", action="store_true")
    q.set_defaults(fn=cmd_supnorm)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FormatError, SchemaError, ValueError, OSError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
