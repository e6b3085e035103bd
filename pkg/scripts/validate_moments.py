#!/usr/bin/env python3
"""Print the closed-form vs Monte Carlo moment table at full replicate counts.

Usage: python scripts/validate_moments.py [--out FILE]

This is the same table the `seqgraph oracle` subcommand produces, run at the
replicate counts the acceptance suite uses (2000 for means, 5000 for
variances), so expect a minute or two of simulation.
"""

import argparse

from seqgraph.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()
    raise SystemExit(
        cli_main(
            ["oracle", "--replicates", "2000", "--var-replicates", "5000", "-o", args.out]
        )
    )


if __name__ == "__main__":
    main()
