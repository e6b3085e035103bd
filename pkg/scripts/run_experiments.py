#!/usr/bin/env python3
"""Run the three synthetic evaluations and drop one results CSV per setting.

Usage: python scripts/run_experiments.py [--seeds N] [--out DIR]
"""

import argparse
from pathlib import Path

from seqgraph.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for experiment in ("overlap", "lengths", "bicluster"):
        dest = out / f"{experiment}.csv"
        code = cli_main(
            ["bench", "--experiment", experiment, "--seeds", str(args.seeds), "-o", str(dest)]
        )
        if code != 0:
            raise SystemExit(code)
        print(f"wrote {dest}")


if __name__ == "__main__":
    main()
