"""Seeded discrete-time simulation of the two-device uplink.

The simulator drives exactly the same chain as the analytic machinery:
allocations come from the policy at the current state, error rates use the
current state's channel bits, and fresh bits only select the next period's
SNR. Randomness comes from numpy's default PCG64 generator; one uniform
draw per period and quantity, in the fixed column order (device-1 failure,
device-2 failure, device-1 next bit, device-2 next bit), so results are
bit-reproducible given (config, policy, periods, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .burstiness import BurstStats, DURATION_CONVENTION
from .markov import TransitionTables, validate_policy
from .states import SystemConfig, SystemState


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministic child seed: the first 64-bit state word of numpy's
    SeedSequence(master_seed, spawn_key=key)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def repetition_seed(master_seed: int, rep: int) -> int:
    """Per-repetition seed used by run_repetitions."""
    return derive_seed(master_seed, rep)


@dataclass
class SimResult:
    periods: int
    outage_count: int
    outage_rate: float
    burst_durations: list[int]
    ioi_durations: list[int]
    mean_burst: float  # nan when no complete burst was observed
    mean_ioi: float
    seed: int
    final_state: SystemState
    outage_sequence: np.ndarray = field(repr=False)


def measure_bursts(outage_sequence, convention: str = DURATION_CONVENTION):
    """Split an outage indicator sequence into maximal runs.

    Returns (burst_durations, ioi_durations). Runs touching either end of
    the sequence are discarded from both lists as boundary-truncated.
    Convention "outage-periods" counts a burst as its number of outage
    periods; "excursion" also counts the recovery period (length + 1).
    """
    if convention not in ("outage-periods", "excursion"):
        raise ValueError(f"unknown duration convention: {convention!r}")
    seq = np.asarray(outage_sequence, dtype=bool)
    bursts: list[int] = []
    iois: list[int] = []
    n = seq.size
    if n == 0:
        return bursts, iois
    change = np.flatnonzero(seq[1:] != seq[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [n]))
    for s, e in zip(starts, ends):
        if s == 0 or e == n:
            continue  # truncated by the observation window
        (bursts if seq[s] else iois).append(int(e - s))
    if convention == "excursion":
        bursts = [b + 1 for b in bursts]
    return bursts, iois


def simulate(
    cfg: SystemConfig,
    policy,
    periods: int,
    seed: int,
    *,
    tables: TransitionTables | None = None,
    convention: str = DURATION_CONVENTION,
) -> SimResult:
    """Simulate the chain for `periods` periods from cfg.initial_state."""
    if periods < 1:
        raise ValueError(f"periods must be >= 1, got {periods}")
    pol = validate_policy(policy, cfg)
    t = tables if tables is not None else TransitionTables(cfg)
    rng = np.random.default_rng(seed)
    u = rng.random((periods, 4))
    eps_bad, eps_good = t.eps_by_bit
    a_max = cfg.a_max
    a_out = cfg.a_out
    n = t.n_total
    alpha1 = cfg.profile.alpha_1
    alpha2 = cfg.profile.alpha_2
    s0 = cfg.initial_state
    a1, a2, x1, x2 = s0.a1, s0.a2, s0.x1, s0.x2
    outage = np.empty(periods, dtype=bool)
    for k in range(periods):
        lam = pol[4 * ((a1 - 1) * a_max + (a2 - 1)) + 2 * x1 + x2]
        e1 = eps_good[lam] if x1 else eps_bad[lam]
        e2 = eps_good[n - lam] if x2 else eps_bad[n - lam]
        a1 = min(a1 + 1, a_max) if u[k, 0] < e1 else 1
        a2 = min(a2 + 1, a_max) if u[k, 1] < e2 else 1
        x1 = 1 if u[k, 2] < alpha1 else 0
        x2 = 1 if u[k, 3] < alpha2 else 0
        outage[k] = a1 > a_out or a2 > a_out
    bursts, iois = measure_bursts(outage, convention)
    count = int(outage.sum())
    return SimResult(
        periods=periods,
        outage_count=count,
        outage_rate=count / periods,
        burst_durations=bursts,
        ioi_durations=iois,
        mean_burst=float(np.mean(bursts)) if bursts else float("nan"),
        mean_ioi=float(np.mean(iois)) if iois else float("nan"),
        seed=seed,
        final_state=SystemState(a1, a2, x1, x2),
        outage_sequence=outage,
    )


@dataclass
class RepetitionSummary:
    reps: int
    periods: int
    master_seed: int
    outage_rates: np.ndarray
    outage_rate_mean: float
    outage_rate_std: float  # sample std (ddof=1), 0 for a single repetition
    burst_durations: list[int]
    ioi_durations: list[int]
    mean_burst: float
    mean_ioi: float
    results: list[SimResult] = field(repr=False, default_factory=list)
    err_p_out: float | None = None
    err_mean_burst: float | None = None
    err_mean_ioi: float | None = None


def run_repetitions(
    cfg: SystemConfig,
    policy,
    reps: int,
    periods: int,
    master_seed: int,
    *,
    analytic: BurstStats | None = None,
    tables: TransitionTables | None = None,
    convention: str = DURATION_CONVENTION,
) -> RepetitionSummary:
    """Independent repetitions with index-derived seeds, pooled statistics,
    and optional normalized errors against analytic predictions."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    t = tables if tables is not None else TransitionTables(cfg)
    results = [
        simulate(cfg, policy, periods, repetition_seed(master_seed, r), tables=t, convention=convention)
        for r in range(reps)
    ]
    rates = np.array([r.outage_rate for r in results])
    bursts: list[int] = []
    iois: list[int] = []
    for r in results:
        bursts.extend(r.burst_durations)
        iois.extend(r.ioi_durations)
    mean_burst = float(np.mean(bursts)) if bursts else float("nan")
    mean_ioi_v = float(np.mean(iois)) if iois else float("nan")
    summary = RepetitionSummary(
        reps=reps,
        periods=periods,
        master_seed=master_seed,
        outage_rates=rates,
        outage_rate_mean=float(rates.mean()),
        outage_rate_std=float(rates.std(ddof=1)) if reps > 1 else 0.0,
        burst_durations=bursts,
        ioi_durations=iois,
        mean_burst=mean_burst,
        mean_ioi=mean_ioi_v,
        results=results,
    )
    if analytic is not None and analytic.defined:
        summary.err_p_out = _normalized_error(summary.outage_rate_mean, analytic.p_out)
        summary.err_mean_burst = _normalized_error(mean_burst, analytic.mean_outage_duration)
        summary.err_mean_ioi = _normalized_error(mean_ioi_v, analytic.mean_ioi)
    return summary


def _normalized_error(measured: float, predicted: float | None) -> float:
    """|measured - predicted| / predicted; nan when either side is unusable."""
    if predicted is None or predicted <= 0.0 or not np.isfinite(measured):
        return float("nan")
    return abs(measured - predicted) / predicted
