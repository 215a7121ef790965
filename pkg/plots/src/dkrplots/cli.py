"""Script entry point: render every figure spec given on the command line."""

from __future__ import annotations

import argparse
import sys

from .figspec import FigureSpecError
from .render import render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dkrotor-plots",
        description="Render dkrotor CSV outputs into figures from JSON figure specs",
    )
    parser.add_argument("spec", nargs="+", help="figure spec JSON file(s)")
    args = parser.parse_args(argv)
    status = 0
    for path in args.spec:
        try:
            out = render(path)
            print(f"{path} -> {out}")
        except FigureSpecError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
