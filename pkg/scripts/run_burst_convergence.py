#!/usr/bin/env python3
"""Measured-vs-analytic burstiness error decay over random policies.

Runs the burst-convergence experiment through the package CLI and prints
the per-checkpoint medians (plot-ready per-policy rows land in the CSV).
"""

import argparse
import csv
import sys

import numpy as np

from aoi_outage import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="scenario_b")
    parser.add_argument("--n-policies", type=int, default=100)
    parser.add_argument("--out", default="burst_convergence.csv")
    args = parser.parse_args()

    code = cli.main(["burst-convergence", "--config", args.config,
                     "--n-policies", str(args.n_policies), "--out", args.out])
    if code != 0:
        return code

    with open(args.out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    checkpoints = sorted({int(r["checkpoint"]) for r in rows})
    print(f"\nmedian normalized errors over {args.n_policies} random policies:")
    print(f"{'periods':>8}{'p_out':>10}{'burst':>10}{'ioi':>10}")
    for cp in checkpoints:
        sub = [r for r in rows if int(r["checkpoint"]) == cp]
        med = [
            float(np.nanmedian([float(r[col]) for r in sub]))
            for col in ("err_p_out", "err_mean_burst", "err_mean_ioi")
        ]
        print(f"{cp:>8}{med[0]:>10.4f}{med[1]:>10.4f}{med[2]:>10.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
