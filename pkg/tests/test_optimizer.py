"""Penalties, the per-state sweep, the recursive loop, and benchmark policies."""

import numpy as np
import pytest

from aoi_outage.fbl import ChannelProfile, LinkParams
from aoi_outage.markov import (
    TransitionTables,
    build_transition_matrix,
    steady_state,
    transition_prob,
)
from aoi_outage.optimizer import (
    PenaltyKind,
    TerminationReason,
    convergence_metric,
    improve_policy,
    min_error_policy,
    naive_policy,
    optimize,
    penalty,
)
from aoi_outage.states import SystemConfig, enumerate_states, is_outage

from conftest import make_config, random_policy

ALL_KINDS = list(PenaltyKind)


def penalty_oracle(cfg, lam, from_index, pi, kind):
    """Literal double-sum evaluation over every successor state."""
    states = enumerate_states(cfg.a_max)
    frm = states[from_index - 1]
    total = 0.0
    for to in states:
        if kind is PenaltyKind.BINARY_OUTAGE:
            w = 1.0 if is_outage(to, cfg.a_out) else 0.0
        elif kind is PenaltyKind.MEAN_SUM_AOI:
            w = to.a1 + to.a2
        elif kind is PenaltyKind.MEAN_PEAK_AOI:
            w = max(to.a1, to.a2)
        else:
            w = np.exp(max(to.a1, to.a2))
        total += w * transition_prob(cfg, lam, frm, to)
    return pi[from_index - 1] * total


@pytest.fixture(scope="module")
def small_pi(small_cfg):
    pol = random_policy(small_cfg, np.random.default_rng(41))
    return steady_state(build_transition_matrix(small_cfg, pol))


class TestConvergenceMetric:
    def test_equal_policies(self):
        assert convergence_metric([3, 1, 2], [3, 1, 2]) == 0.0

    def test_worked_examples(self):
        assert convergence_metric([2, 0], [0, 2]) == pytest.approx(2.0, rel=1e-14)
        assert convergence_metric([4], [0]) == pytest.approx(2.0, rel=1e-14)

    def test_zero_sum_rejected(self):
        with pytest.raises(ValueError):
            convergence_metric([0, 0], [0, 0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            convergence_metric([1, 2], [1, 2, 3])


class TestBenchmarkPolicies:
    def test_naive_even_split(self, cfg_b):
        pol = naive_policy(cfg_b)
        assert pol.shape == (100,)
        assert np.all(pol == 500)

    def test_naive_floors_odd_budget(self):
        cfg = make_config(n=3, d=1)
        assert np.all(naive_policy(cfg) == 1)

    def test_min_error_depends_only_on_bits(self, cfg_b):
        pol = min_error_policy(cfg_b)
        states = enumerate_states(cfg_b.a_max)
        by_bits = {}
        for lam, s in zip(pol, states):
            by_bits.setdefault((s.x1, s.x2), set()).add(int(lam))
        assert all(len(v) == 1 for v in by_bits.values())

    def test_min_error_symmetric_bits_split_evenly(self, cfg_b):
        pol = min_error_policy(cfg_b)
        states = enumerate_states(cfg_b.a_max)
        lam = {(s.x1, s.x2): int(l) for s, l in zip(states, pol)}
        assert lam[0, 0] == 500
        assert lam[1, 1] == 500

    def test_min_error_favors_weak_channel(self, cfg_b):
        pol = min_error_policy(cfg_b)
        states = enumerate_states(cfg_b.a_max)
        lam = {(s.x1, s.x2): int(l) for s, l in zip(states, pol)}
        assert lam[1, 0] < 500  # own channel good: cede symbols to the other device
        assert lam[0, 1] > 500
        assert lam[1, 0] + lam[0, 1] == 1000  # mirror symmetry of the summed objective

    def test_min_error_truly_minimizes(self, cfg_b, tables_b):
        pol = min_error_policy(cfg_b, tables=tables_b)
        n = cfg_b.link.blocklength_total
        states = enumerate_states(cfg_b.a_max)
        lam = {(s.x1, s.x2): int(l) for s, l in zip(states, pol)}
        sweep = np.arange(n + 1)
        for (b1, b2), l in lam.items():
            total = tables_b.eps_by_bit[b1][sweep] + tables_b.eps_by_bit[b2][n - sweep]
            assert total[l] == total.min()
            assert l == int(np.argmin(total))


class TestPenalty:
    def test_binary_zero_when_outage_set_empty(self):
        with pytest.warns(UserWarning):
            cfg = make_config(a_max=2, a_out=2)
        pi = np.full(cfg.n_states, 1 / cfg.n_states)
        for lam in (0, 11, 40):
            assert penalty(cfg, lam, 3, pi, PenaltyKind.BINARY_OUTAGE) == 0.0

    def test_sum_weight_is_constant_on_degenerate_chain(self):
        with pytest.warns(UserWarning):
            cfg = make_config(a_max=1, a_out=1)
        pi = np.array([0.4, 0.3, 0.2, 0.1])
        for i in range(1, 5):
            for lam in (0, 17, 40):
                assert penalty(cfg, lam, i, pi, PenaltyKind.MEAN_SUM_AOI) == pytest.approx(
                    2 * pi[i - 1], rel=1e-13
                )

    def test_weight_dominance(self, small_cfg, small_pi):
        for i in (1, 6, 16):
            for lam in (0, 13, 40):
                exp_pen = penalty(small_cfg, lam, i, small_pi, PenaltyKind.EXP_MEAN_PEAK_AOI)
                peak = penalty(small_cfg, lam, i, small_pi, PenaltyKind.MEAN_PEAK_AOI)
                summed = penalty(small_cfg, lam, i, small_pi, PenaltyKind.MEAN_SUM_AOI)
                assert exp_pen >= peak >= 0.5 * summed

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_matches_double_sum_oracle(self, small_cfg, small_pi, kind):
        for i in (1, 4, 9, 16):
            for lam in (0, 3, 21, 40):
                assert penalty(small_cfg, lam, i, small_pi, kind) == pytest.approx(
                    penalty_oracle(small_cfg, lam, i, small_pi, kind), rel=1e-12, abs=1e-300
                )

    def test_rejects_bad_args(self, small_cfg, small_pi):
        with pytest.raises(ValueError):
            penalty(small_cfg, -1, 1, small_pi, PenaltyKind.BINARY_OUTAGE)
        with pytest.raises(ValueError):
            penalty(small_cfg, 0, 0, small_pi, PenaltyKind.BINARY_OUTAGE)
        with pytest.raises(ValueError):
            penalty(small_cfg, 0, 17, small_pi, PenaltyKind.BINARY_OUTAGE)


class TestImprovePolicy:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_sweep_matches_exhaustive_minimum(self, small_cfg, small_pi, kind):
        improved = improve_policy(small_cfg, small_pi, kind)
        n = small_cfg.link.blocklength_total
        for i in range(small_cfg.n_states):
            values = np.array(
                [penalty(small_cfg, lam, i + 1, small_pi, kind) for lam in range(n + 1)]
            )
            chosen = penalty(small_cfg, int(improved[i]), i + 1, small_pi, kind)
            assert chosen == values.min()
            assert int(improved[i]) == int(np.argmin(values))  # smallest-allocation tie-break

    def test_bounds(self, small_cfg, small_pi):
        for kind in ALL_KINDS:
            improved = improve_policy(small_cfg, small_pi, kind)
            assert improved.min() >= 0
            assert improved.max() <= small_cfg.link.blocklength_total

    def test_symmetric_states_lean_small(self):
        profile = ChannelProfile(0.5, 0.5, -12.2, -15.2)
        link = LinkParams(40, 2)
        cfg = SystemConfig(profile=profile, link=link, a_max=2, a_out=1, epsilon_cvg=1e-5)
        pi = np.full(cfg.n_states, 1 / cfg.n_states)
        states = enumerate_states(cfg.a_max)
        for kind in ALL_KINDS:
            improved = improve_policy(cfg, pi, kind)
            for s, lam in zip(states, improved):
                if s.a1 == s.a2 and s.x1 == s.x2:
                    assert lam <= cfg.link.blocklength_total // 2

    def test_shields_endangered_device(self, cfg_b, tables_b):
        # device 1 sits at the threshold, device 2 is fresh: the binary
        # penalty is minimized by sending as much as possible to device 1
        pi = steady_state(build_transition_matrix(cfg_b, naive_policy(cfg_b), tables=tables_b))
        improved = improve_policy(cfg_b, pi, PenaltyKind.BINARY_OUTAGE, tables=tables_b)
        states = enumerate_states(cfg_b.a_max)
        for s, lam in zip(states, improved):
            if s.a1 == cfg_b.a_out and s.a2 == 1:
                assert lam > 500

    def test_zero_mass_state_gets_zero_allocation(self, small_cfg, small_pi):
        pi = small_pi.copy()
        pi[4] = 0.0
        improved = improve_policy(small_cfg, pi, PenaltyKind.MEAN_PEAK_AOI)
        assert improved[4] == 0

    def test_scale_invariance(self, small_cfg, small_pi):
        for kind in ALL_KINDS:
            a = improve_policy(small_cfg, small_pi, kind)
            b = improve_policy(small_cfg, 3.0 * small_pi, kind)
            assert np.array_equal(a, b)


class TestOptimize:
    def test_deterministic(self, small_cfg):
        r1 = optimize(small_cfg, PenaltyKind.EXP_MEAN_PEAK_AOI, seed=7, max_iter=50)
        r2 = optimize(small_cfg, PenaltyKind.EXP_MEAN_PEAK_AOI, seed=7, max_iter=50)
        assert np.array_equal(r1.final_policy, r2.final_policy)
        assert r1.convergence_trace == r2.convergence_trace
        assert r1.terminated_by == r2.terminated_by

    def test_degenerate_chain_converges_fast(self):
        with pytest.warns(UserWarning):
            cfg = make_config(a_max=1, a_out=1)
        report = optimize(cfg, PenaltyKind.MEAN_SUM_AOI, seed=3)
        assert report.terminated_by is TerminationReason.CONVERGED
        assert report.iterations <= 2

    def test_report_invariants(self, small_cfg):
        report = optimize(small_cfg, PenaltyKind.MEAN_PEAK_AOI, seed=1, max_iter=60)
        assert report.iterations == len(report.convergence_trace)
        assert report.iterations >= 1
        traced = [row[2] for row in report.convergence_trace]
        assert report.best_p_out == min(traced)
        assert report.convergence_trace[report.best_iteration - 1][2] == report.best_p_out
        assert report.final_policy.min() >= 0
        assert report.final_policy.max() <= small_cfg.link.blocklength_total

    def test_rejects_bad_max_iter(self, small_cfg):
        with pytest.raises(ValueError):
            optimize(small_cfg, PenaltyKind.BINARY_OUTAGE, seed=0, max_iter=0)
