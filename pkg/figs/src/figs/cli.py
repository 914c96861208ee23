"""figs command line: `figs <figure-id> --in <result dir> --out <path>`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import FIGURE_IDS
from .render import render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figs", description=__doc__)
    parser.add_argument("figure_id", choices=FIGURE_IDS, help="figure analogue to render")
    parser.add_argument("--in", dest="in_dir", type=Path, required=True,
                        help="result directory written by the kickedatom CLI")
    parser.add_argument("--out", type=Path, default=None,
                        help="output image path (default <in>/<figure-id>.png)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or (args.in_dir / f"{args.figure_id}.png")
    try:
        path = render(args.figure_id, args.in_dir, out)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.figure_id} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
