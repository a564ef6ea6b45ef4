"""Solve both reference extension problems and report oracle deviations.

Writes CSV curves next to the chosen output directory and prints a JSON
summary per profile. Equivalent CLI:

    caputo-density extend --profile appendix-es1 --grid 1.01:5:200 --out es1.csv
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from caputo_density.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out", help="directory for the CSV curves")
    parser.add_argument("--grid", default="1.01:5:200")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for profile in ("appendix-es1", "appendix-es2"):
        code = cli_main(
            [
                "extend",
                "--profile",
                profile,
                "--grid",
                args.grid,
                "--out",
                str(outdir / f"extend_{profile}.csv"),
            ]
        )
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
