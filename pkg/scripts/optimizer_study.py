#!/usr/bin/env python3
"""Compare all four penalties against the benchmark policies per scenario.

For each preset and penalty the optimizer runs over a block of seeds;
the table reports best and median analytic outage rates, next to the two
benchmark policies.
"""

import argparse
import sys

import numpy as np

from aoi_outage import (
    PenaltyKind,
    TransitionTables,
    build_transition_matrix,
    load_scenario,
    min_error_policy,
    naive_policy,
    optimize,
    outage_probability,
    steady_state,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--scenarios", nargs="+",
                        default=["scenario_a", "scenario_b", "scenario_c"])
    args = parser.parse_args()

    print(f"{'scenario':<12}{'policy':<16}{'best p_out':>14}{'median p_out':>14}{'iters':>7}")
    for preset in args.scenarios:
        scenario = load_scenario(preset)
        cfg = scenario.system
        tables = TransitionTables(cfg)
        for kind in PenaltyKind:
            reports = [
                optimize(cfg, kind, seed, scenario.optimizer.max_iter, tables=tables)
                for seed in range(args.seeds)
            ]
            p_outs = np.array([r.best_p_out for r in reports])
            iters = int(np.median([r.iterations for r in reports]))
            print(f"{preset:<12}{kind.value:<16}{p_outs.min():>14.6e}"
                  f"{np.median(p_outs):>14.6e}{iters:>7}")
        for name, policy in (("naive", naive_policy(cfg)),
                             ("min-error", min_error_policy(cfg, tables=tables))):
            p = build_transition_matrix(cfg, policy, tables=tables)
            p_out = outage_probability(steady_state(p), cfg)
            print(f"{preset:<12}{name:<16}{p_out:>14.6e}{p_out:>14.6e}{'-':>7}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
