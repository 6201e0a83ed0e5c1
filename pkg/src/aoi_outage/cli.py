"""Command-line front end.

Subcommands:
  optimize           run the recursive optimizer for one scenario and penalty
  evaluate           analytic outage rate and burst statistics for a policy
  simulate           seeded Monte-Carlo repetitions for a policy
  reproduce-table2   the full 3-scenario x 6-policy benchmark grid (CSV)
  burst-convergence  measured-vs-analytic error decay over random policies (CSV)

Configs are JSON documents (see scenarios.py) or preset names. Reports are
JSON with a metadata block; tabular outputs are CSV with stable columns.
Exit codes: 0 success, 1 usage or config error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .burstiness import BurstStats, DURATION_CONVENTION, burst_stats
from .markov import TransitionTables, validate_policy
from .optimizer import PenaltyKind, min_error_policy, naive_policy, optimize
from .reference import PUBLISHED_OUTAGE_RATES
from .scenarios import ConfigError, Scenario, load_scenario
from .simulate import derive_seed, measure_bursts, run_repetitions, simulate

CHECKPOINTS = (500, 1000, 2500, 5000, 10000)
PENALTY_CHOICES = tuple(k.value for k in PenaltyKind)
POLICY_CHOICES = ("naive", "min-error", "file")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this front end uses 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _metadata(scenario: Scenario) -> dict:
    return {
        "tool_version": __version__,
        "scenario": scenario.name,
        "config_hash": scenario.config_hash,
        "duration_convention": DURATION_CONVENTION,
    }


def _burst_dict(stats: BurstStats) -> dict:
    return {
        "defined": stats.defined,
        "p_out": stats.p_out,
        "xi_res_out_1": stats.xi_res_out_1,
        "mean_outage_duration": stats.mean_outage_duration,
        "mean_ioi": stats.mean_ioi,
        "duration_pmf": None if stats.duration_pmf is None else stats.duration_pmf.tolist(),
        "truncation_t": stats.truncation_t,
        "truncation_residual": stats.truncation_residual,
        "convention": stats.convention,
    }


def _write_json(path: str, document: dict) -> None:
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=False) + "\n")


def _resolve_policy(scenario: Scenario, policy_name: str, policy_file: str | None):
    cfg = scenario.system
    if policy_name == "naive":
        return naive_policy(cfg), "naive"
    if policy_name == "min-error":
        return min_error_policy(cfg), "min-error"
    if policy_file is None:
        raise ConfigError("--policy file requires --policy-file PATH")
    try:
        document = json.loads(Path(policy_file).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in policy file {policy_file}: {exc}") from exc
    if isinstance(document, dict) and "policy_lambda" in document:
        lam = document["policy_lambda"]
    elif isinstance(document, dict) and "best" in document:
        lam = document["best"]["policy_lambda"]
    else:
        raise ConfigError("policy file must carry a 'policy_lambda' array")
    return validate_policy(np.asarray(lam), cfg), f"file:{policy_file}"


def cmd_optimize(args) -> int:
    scenario = load_scenario(args.config)
    cfg = scenario.system
    kind = PenaltyKind(args.penalty)
    n_seeds = args.seeds if args.seeds is not None else scenario.optimizer.seeds
    max_iter = args.max_iter if args.max_iter is not None else scenario.optimizer.max_iter
    tables = TransitionTables(cfg)
    reports = [optimize(cfg, kind, seed, max_iter, tables=tables) for seed in range(n_seeds)]
    best = min(reports, key=lambda r: r.best_p_out)
    p_outs = sorted(r.best_p_out for r in reports)
    document = {
        "metadata": _metadata(scenario),
        "penalty": kind.value,
        "n_seeds": n_seeds,
        "max_iter": max_iter,
        "seed_reports": [
            {
                "seed": r.seed,
                "iterations": r.iterations,
                "terminated_by": r.terminated_by.value,
                "best_p_out": r.best_p_out,
                "best_iteration": r.best_iteration,
                "trace": [
                    {"iteration": it, "metric": m, "p_out": po}
                    for it, m, po in r.convergence_trace
                ],
            }
            for r in reports
        ],
        "best": {
            "seed": best.seed,
            "analytic_p_out": best.best_p_out,
            "policy_lambda": best.final_policy.tolist(),
            "index_base": 1,
        },
        "median_p_out": p_outs[len(p_outs) // 2],
    }
    _write_json(args.out, document)
    print(f"optimize[{scenario.name}/{kind.value}]: best analytic p_out "
          f"{best.best_p_out:.6e} over {n_seeds} seeds -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    scenario = load_scenario(args.config)
    policy, source = _resolve_policy(scenario, args.policy, args.policy_file)
    stats = burst_stats(scenario.system, policy)
    document = {
        "metadata": _metadata(scenario),
        "policy_source": source,
        "analytic_p_out": stats.p_out,
        "burst": _burst_dict(stats),
    }
    _write_json(args.out, document)
    print(f"evaluate[{scenario.name}/{source}]: analytic p_out {stats.p_out:.6e} -> {args.out}")
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config)
    cfg = scenario.system
    policy, source = _resolve_policy(scenario, args.policy, args.policy_file)
    reps = args.reps if args.reps is not None else scenario.simulation.reps
    periods = args.periods if args.periods is not None else scenario.simulation.periods
    stats = burst_stats(cfg, policy)
    summary = run_repetitions(
        cfg, policy, reps, periods, scenario.simulation.master_seed, analytic=stats
    )
    document = {
        "metadata": _metadata(scenario),
        "policy_source": source,
        "reps": reps,
        "periods": periods,
        "master_seed": scenario.simulation.master_seed,
        "outage_rate_mean": summary.outage_rate_mean,
        "outage_rate_std": summary.outage_rate_std,
        "per_rep_outage_rate": summary.outage_rates.tolist(),
        "n_bursts": len(summary.burst_durations),
        "mean_burst": summary.mean_burst,
        "n_iois": len(summary.ioi_durations),
        "mean_ioi": summary.mean_ioi,
        "analytic": _burst_dict(stats),
        "normalized_errors": {
            "p_out": summary.err_p_out,
            "mean_burst": summary.err_mean_burst,
            "mean_ioi": summary.err_mean_ioi,
        },
    }
    _write_json(args.out, document)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rep", "seed", "outage_rate", "n_bursts", "mean_burst", "n_iois", "mean_ioi"])
            for rep, result in enumerate(summary.results):
                writer.writerow([
                    rep, result.seed, result.outage_rate,
                    len(result.burst_durations), result.mean_burst,
                    len(result.ioi_durations), result.mean_ioi,
                ])
    print(f"simulate[{scenario.name}/{source}]: mean outage rate "
          f"{summary.outage_rate_mean:.6e} over {reps} x {periods} periods -> {args.out}")
    return 0


_TABLE2_POLICIES = ("binary", "sum-aoi", "peak-aoi", "exp-peak-aoi", "naive", "min-error")


def cmd_reproduce_table2(args) -> int:
    rows = []
    started = time.time()
    for preset in ("scenario_a", "scenario_b", "scenario_c"):
        scenario = load_scenario(preset)
        cfg = scenario.system
        tables = TransitionTables(cfg)
        seeds = args.seeds if args.seeds is not None else scenario.optimizer.seeds
        reps = args.reps if args.reps is not None else scenario.simulation.reps
        periods = args.periods if args.periods is not None else scenario.simulation.periods
        for policy_name in _TABLE2_POLICIES:
            if policy_name == "naive":
                policy = naive_policy(cfg)
            elif policy_name == "min-error":
                policy = min_error_policy(cfg, tables=tables)
            else:
                kind = PenaltyKind(policy_name)
                reports = [
                    optimize(cfg, kind, seed, scenario.optimizer.max_iter, tables=tables)
                    for seed in range(seeds)
                ]
                policy = min(reports, key=lambda r: r.best_p_out).final_policy
            stats = burst_stats(cfg, policy, tables=tables)
            summary = run_repetitions(
                cfg, policy, reps, periods, scenario.simulation.master_seed,
                analytic=stats, tables=tables,
            )
            rows.append({
                "scenario": preset,
                "policy": policy_name,
                "analytic_p_out": stats.p_out,
                "empirical_mean_p_out": summary.outage_rate_mean,
                "empirical_std_p_out": summary.outage_rate_std,
                "published_p_out": PUBLISHED_OUTAGE_RATES[preset, policy_name],
                "seeds": seeds if policy_name in PENALTY_CHOICES else 0,
                "reps": reps,
                "periods": periods,
            })
            print(f"  {preset:10s} {policy_name:12s} analytic {stats.p_out:.6e} "
                  f"empirical {summary.outage_rate_mean:.6e}")
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"reproduce-table2: {len(rows)} rows in {time.time() - started:.1f}s -> {args.out}")
    return 0


def cmd_burst_convergence(args) -> int:
    scenario = load_scenario(args.config)
    cfg = scenario.system
    tables = TransitionTables(cfg)
    master = scenario.simulation.master_seed
    horizon = max(CHECKPOINTS)
    fieldnames = [
        "policy_id", "sim_seed", "checkpoint",
        "measured_p_out", "analytic_p_out", "err_p_out",
        "measured_mean_burst", "analytic_mean_burst", "err_mean_burst",
        "measured_mean_ioi", "analytic_mean_ioi", "err_mean_ioi",
    ]
    rows = []
    errors = {cp: [] for cp in CHECKPOINTS}
    for pid in range(args.n_policies):
        policy_rng = np.random.default_rng(derive_seed(master, pid, 0))
        policy = policy_rng.integers(0, cfg.link.blocklength_total + 1, size=cfg.n_states)
        stats = burst_stats(cfg, policy, tables=tables)
        if not stats.defined:
            raise RuntimeError(f"policy {pid} has no reachable outage; burst errors undefined")
        sim_seed = derive_seed(master, pid, 1)
        result = simulate(cfg, policy, horizon, sim_seed, tables=tables)
        for cp in CHECKPOINTS:
            prefix = result.outage_sequence[:cp]
            measured_p = float(prefix.mean())
            bursts, iois = measure_bursts(prefix)
            measured_burst = float(np.mean(bursts)) if bursts else float("nan")
            measured_ioi = float(np.mean(iois)) if iois else float("nan")
            err_p = abs(measured_p - stats.p_out) / stats.p_out
            err_b = abs(measured_burst - stats.mean_outage_duration) / stats.mean_outage_duration
            err_i = abs(measured_ioi - stats.mean_ioi) / stats.mean_ioi
            errors[cp].append((err_p, err_b, err_i))
            rows.append({
                "policy_id": pid, "sim_seed": sim_seed, "checkpoint": cp,
                "measured_p_out": measured_p, "analytic_p_out": stats.p_out, "err_p_out": err_p,
                "measured_mean_burst": measured_burst,
                "analytic_mean_burst": stats.mean_outage_duration, "err_mean_burst": err_b,
                "measured_mean_ioi": measured_ioi,
                "analytic_mean_ioi": stats.mean_ioi, "err_mean_ioi": err_i,
            })
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    for cp in CHECKPOINTS:
        med = np.nanmedian(np.asarray(errors[cp], dtype=float), axis=0)
        print(f"  checkpoint {cp:6d}: median errors p_out {med[0]:.4f} "
              f"burst {med[1]:.4f} ioi {med[2]:.4f}")
    print(f"burst-convergence: {len(rows)} rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aoi-outage", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_opt = sub.add_parser("optimize", help="run the recursive policy optimizer")
    p_opt.add_argument("--config", required=True, help="preset name or JSON config path")
    p_opt.add_argument("--penalty", required=True, choices=PENALTY_CHOICES)
    p_opt.add_argument("--seeds", type=int, default=None, help="override optimizer.seeds")
    p_opt.add_argument("--max-iter", type=int, default=None, help="override optimizer.max_iter")
    p_opt.add_argument("--out", required=True, help="output JSON path")
    p_opt.set_defaults(func=cmd_optimize)

    p_eval = sub.add_parser("evaluate", help="analytic outage rate and burst statistics")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--policy", required=True, choices=POLICY_CHOICES)
    p_eval.add_argument("--policy-file", default=None, help="JSON file with policy_lambda")
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="seeded Monte-Carlo repetitions")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--policy", required=True, choices=POLICY_CHOICES)
    p_sim.add_argument("--policy-file", default=None)
    p_sim.add_argument("--reps", type=int, default=None, help="override simulation.reps")
    p_sim.add_argument("--periods", type=int, default=None, help="override simulation.periods")
    p_sim.add_argument("--out", required=True, help="output JSON path")
    p_sim.add_argument("--csv", default=None, help="optional per-repetition CSV path")
    p_sim.set_defaults(func=cmd_simulate)

    p_tab = sub.add_parser("reproduce-table2", help="benchmark grid over all presets")
    p_tab.add_argument("--out", required=True, help="output CSV path")
    p_tab.add_argument("--seeds", type=int, default=None, help="override optimizer.seeds")
    p_tab.add_argument("--reps", type=int, default=None)
    p_tab.add_argument("--periods", type=int, default=None)
    p_tab.set_defaults(func=cmd_reproduce_table2)

    p_cvg = sub.add_parser("burst-convergence", help="error decay over random policies")
    p_cvg.add_argument("--config", required=True)
    p_cvg.add_argument("--n-policies", type=int, default=100)
    p_cvg.add_argument("--out", required=True, help="output CSV path")
    p_cvg.set_defaults(func=cmd_burst_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
