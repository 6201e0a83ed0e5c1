"""Blocklength allocation against age-of-information outage.

Two devices share a fixed short-packet blocklength each period over
independently fading uplinks. The package models the joint age/channel
process as a finite Markov chain, optimizes the per-state split with a
recursive penalty-driven sweep, characterizes how outages cluster into
bursts, and cross-validates everything with a seeded simulator.
"""

__version__ = "0.1.0"

from .burstiness import (
    BurstStats,
    OutageUnreachableError,
    burst_stats,
    mean_ioi,
    mean_outage_duration,
    outage_duration_pmf,
    xi_matrix,
    xi_set_to_set,
)
from .fbl import (
    ChannelProfile,
    LinkParams,
    block_error_rate,
    channel_dispersion,
    db_to_linear,
    q_function,
    shannon_capacity,
)
from .markov import (
    SteadyStateError,
    TransitionTables,
    build_transition_matrix,
    k_step_distribution,
    outage_probability,
    steady_state,
    transition_prob,
    validate_policy,
)
from .optimizer import (
    OptimizeReport,
    PenaltyKind,
    TerminationReason,
    convergence_metric,
    improve_policy,
    min_error_policy,
    naive_policy,
    optimize,
    penalty,
)
from .scenarios import ConfigError, Scenario, load_scenario, parse_scenario, PRESETS
from .simulate import (
    RepetitionSummary,
    SimResult,
    derive_seed,
    measure_bursts,
    repetition_seed,
    run_repetitions,
    simulate,
)
from .states import (
    SystemConfig,
    SystemState,
    enumerate_states,
    index_to_state,
    is_outage,
    outage_mask,
    state_to_index,
)
