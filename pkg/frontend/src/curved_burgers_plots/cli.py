"""`plots` command line: render figures from solver CSV output.

Exit codes: 0 success, 2 on missing files, bad columns, or bad arguments.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, make_figure
from .reader import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description="Render figures from curved-burgers CSV output.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_make = sub.add_parser("make", help="render one figure")
    p_make.add_argument("--kind", required=True, choices=KINDS)
    p_make.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="CSV")
    p_make.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs), output=args.out)
        result = make_figure(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.path}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
