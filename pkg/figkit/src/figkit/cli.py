"""Command-line entry point.

    figkit render <figure_id> --data DIR --out FILE
    figkit list
"""

from __future__ import annotations

import argparse
import sys

from .recipes import RECIPES, recipe_for
from .render import SchemaError, render_figure


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="figkit",
        description="Render cavity-array figures from simulation CSV output.")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render one canonical figure")
    render.add_argument("figure_id", help="canonical figure id (figkit list)")
    render.add_argument("--data", required=True, metavar="DIR",
                        help="directory holding the simulation CSV files")
    render.add_argument("--out", required=True, metavar="FILE",
                        help="output image path (.svg, .png, .pdf)")

    sub.add_parser("list", help="list known figure ids")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        for fid, recipe in RECIPES.items():
            print(f"{fid:7s} {recipe.title} (inputs: {', '.join(recipe.inputs)})")
        return 0
    try:
        recipe = recipe_for(args.figure_id)
    except KeyError as err:
        print(err.args[0], file=sys.stderr)
        return 2
    try:
        out = render_figure(recipe, args.data, args.out)
    except SchemaError as err:
        print(f"input schema mismatch: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"I/O failure: {err}", file=sys.stderr)
        return 4
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
