#!/usr/bin/env python3
"""Run the full benchmark grid (3 scenarios x 6 policies) and print it.

Writes the CSV via the package CLI, then renders a compact comparison of
analytic, empirical, and published outage rates.
"""

import argparse
import csv
import sys

from aoi_outage import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="table2.csv")
    parser.add_argument("--seeds", type=int, default=None, help="optimizer seeds per penalty")
    parser.add_argument("--reps", type=int, default=None)
    parser.add_argument("--periods", type=int, default=None)
    args = parser.parse_args()

    argv = ["reproduce-table2", "--out", args.out]
    for flag, value in (("--seeds", args.seeds), ("--reps", args.reps), ("--periods", args.periods)):
        if value is not None:
            argv += [flag, str(value)]
    code = cli.main(argv)
    if code != 0:
        return code

    with open(args.out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    print(f"\n{'scenario':<12}{'policy':<14}{'analytic':>12}{'empirical':>12}{'published':>12}")
    for row in rows:
        print(f"{row['scenario']:<12}{row['policy']:<14}"
              f"{float(row['analytic_p_out']):>12.6f}"
              f"{float(row['empirical_mean_p_out']):>12.6f}"
              f"{float(row['published_p_out']):>12.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
