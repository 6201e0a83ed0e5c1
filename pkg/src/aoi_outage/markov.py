"""Dense Markov machinery for the two-device age chain.

Exact one-step transition probabilities under a blocklength split, dense
matrix assembly, stationary distribution, k-step distributions, and the
stationary outage rate. A policy is an integer vector over the enumerated
state space giving device 1's share of the shared blocklength; device 2
receives the remainder.

Timing convention: the error rates governing the transition out of a state
use the channel bits stored in that state; the successor's bits are fresh
independent draws and only select the next period's SNR.
"""

from __future__ import annotations

import numpy as np

from .fbl import block_error_rate
from .states import SystemConfig, SystemState, enumerate_states, outage_mask

ROW_SUM_TOL = 1e-12
RESIDUAL_TOL = 1e-10
NEGATIVE_MASS_TOL = -1e-14


class SteadyStateError(RuntimeError):
    """Stationary solve failed or violated its invariants (non-ergodic input)."""


def validate_policy(policy, cfg: SystemConfig) -> np.ndarray:
    """Check length, integrality and range; returns the policy as an int array."""
    arr = np.asarray(policy)
    if arr.shape != (cfg.n_states,):
        raise ValueError(f"policy must have shape ({cfg.n_states},), got {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise ValueError("policy entries must be integers")
        arr = rounded.astype(np.int64)
    n = cfg.link.blocklength_total
    if arr.min() < 0 or arr.max() > n:
        raise ValueError(f"policy entries must lie in [0, {n}]")
    return arr.astype(np.int64, copy=False)


class TransitionTables:
    """Precomputed per-config arrays shared by the matrix builder, the policy
    sweep and the simulator: block error rates for every allocation at both
    SNR levels, decoded state fields, clamped age successors, and the
    fresh-channel-bit weights."""

    def __init__(self, cfg: SystemConfig):
        self.cfg = cfg
        n = cfg.link.blocklength_total
        d = cfg.link.payload_bits
        alloc = np.arange(n + 1)
        # index by channel bit: 0 = bad level, 1 = good level
        self.eps_by_bit = (
            block_error_rate(alloc, d, cfg.profile.gamma_bad),
            block_error_rate(alloc, d, cfg.profile.gamma_good),
        )
        states = enumerate_states(cfg.a_max)
        self.a1 = np.array([s.a1 for s in states])
        self.a2 = np.array([s.a2 for s in states])
        self.x1 = np.array([s.x1 for s in states])
        self.x2 = np.array([s.x2 for s in states])
        self.succ_a1 = np.minimum(self.a1 + 1, cfg.a_max)
        self.succ_a2 = np.minimum(self.a2 + 1, cfg.a_max)
        self.outage = outage_mask(cfg.a_max, cfg.a_out)
        a1p = cfg.profile.alpha_1
        a2p = cfg.profile.alpha_2
        # order matches the bit suffix of the state index: (0,0),(0,1),(1,0),(1,1)
        self.bit_weights = np.array(
            [(1 - a1p) * (1 - a2p), (1 - a1p) * a2p, a1p * (1 - a2p), a1p * a2p]
        )

    @property
    def n_total(self) -> int:
        return self.cfg.link.blocklength_total

    def row_base(self, a1_next: int, a2_next: int) -> int:
        """0-based position of state (a1_next, a2_next, 0, 0)."""
        return 4 * ((a1_next - 1) * self.cfg.a_max + (a2_next - 1))


def transition_prob(
    cfg: SystemConfig, lam: int, from_state: SystemState, to_state: SystemState
) -> float:
    """One-step probability of `to_state` given `from_state` under allocation lam.

    Each device's age either resets to 1 (success) or increments with
    clamping at a_max (failure); branch probabilities accumulate when the
    clamp makes the two outcomes coincide. Fresh channel bits are weighted
    by their Bernoulli probabilities.
    """
    n = cfg.link.blocklength_total
    if not 0 <= lam <= n:
        raise ValueError(f"allocation must lie in [0, {n}], got {lam}")
    from_state.validate(cfg.a_max)
    to_state.validate(cfg.a_max)
    d = cfg.link.payload_bits
    e1 = block_error_rate(lam, d, cfg.profile.gamma_for_bit(from_state.x1))
    e2 = block_error_rate(n - lam, d, cfg.profile.gamma_for_bit(from_state.x2))
    clamp1 = min(from_state.a1 + 1, cfg.a_max)
    clamp2 = min(from_state.a2 + 1, cfg.a_max)
    p1 = (1.0 - e1) * (to_state.a1 == 1) + e1 * (to_state.a1 == clamp1)
    p2 = (1.0 - e2) * (to_state.a2 == 1) + e2 * (to_state.a2 == clamp2)
    w = cfg.profile.bit_probability(1, to_state.x1) * cfg.profile.bit_probability(2, to_state.x2)
    return p1 * p2 * w


def build_transition_matrix(cfg: SystemConfig, policy, *, tables: TransitionTables | None = None) -> np.ndarray:
    """Dense row-stochastic transition matrix of the chain induced by `policy`."""
    pol = validate_policy(policy, cfg)
    t = tables if tables is not None else TransitionTables(cfg)
    n_states = cfg.n_states
    p = np.zeros((n_states, n_states))
    w = t.bit_weights
    for i in range(n_states):
        lam = pol[i]
        e1 = t.eps_by_bit[t.x1[i]][lam]
        e2 = t.eps_by_bit[t.x2[i]][t.n_total - lam]
        c1 = t.succ_a1[i]
        c2 = t.succ_a2[i]
        for a1n, p1 in ((1, 1.0 - e1), (c1, e1)):
            for a2n, p2 in ((1, 1.0 - e2), (c2, e2)):
                base = t.row_base(a1n, a2n)
                p[i, base : base + 4] += (p1 * p2) * w
    return p


def _check_stochastic(p: np.ndarray) -> None:
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {p.shape}")
    if p.min() < 0.0 or p.max() > 1.0 + ROW_SUM_TOL:
        raise ValueError("transition probabilities must lie in [0, 1]")
    row_err = np.abs(p.sum(axis=1) - 1.0).max()
    if row_err > ROW_SUM_TOL:
        raise ValueError(f"rows must sum to 1 within {ROW_SUM_TOL}, worst error {row_err:.3e}")


def steady_state(p) -> np.ndarray:
    """Unique stationary distribution of a row-stochastic matrix.

    Solves (I - P^T) pi = 0 with the natural rank-1 deficiency repaired by
    replacing the last equation with the normalization sum(pi) = 1, then
    verifies stationarity. Raises SteadyStateError when the system is
    singular beyond that deficiency or the solution violates invariants.
    """
    p = np.asarray(p, dtype=float)
    _check_stochastic(p)
    n = p.shape[0]
    m = np.eye(n) - p.T
    m[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SteadyStateError("singular stationary system (chain not ergodic)") from exc
    if pi.min() < NEGATIVE_MASS_TOL:
        raise SteadyStateError(f"stationary solve produced negative mass {pi.min():.3e}")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = np.abs(pi @ p - pi).max()
    if residual >= RESIDUAL_TOL:
        raise SteadyStateError(f"stationarity residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return pi


def k_step_distribution(p, initial_index: int, k: int) -> np.ndarray:
    """State distribution after k periods from the 1-based initial index.

    Computed by iterated vector-matrix products, never by matrix powers.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    if not 1 <= initial_index <= n:
        raise ValueError(f"initial_index must lie in [1, {n}], got {initial_index}")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    v = np.zeros(n)
    v[initial_index - 1] = 1.0
    for _ in range(k):
        v = v @ p
    return v


def outage_probability(pi, cfg: SystemConfig) -> float:
    """Stationary outage rate: total mass on states past the age threshold."""
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (cfg.n_states,):
        raise ValueError(f"pi must have shape ({cfg.n_states},), got {pi.shape}")
    return float(pi[outage_mask(cfg.a_max, cfg.a_out)].sum())
