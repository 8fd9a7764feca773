import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corralsim import (
    BaseSpec,
    ConfigError,
    EnvSpec,
    ExperimentConfig,
    InvariantViolation,
    MasterSpec,
    NoiseSpec,
    make_geometric_grid,
    pseudo_regret,
    run_monte_carlo,
    run_once,
    sublinearity_slope,
)
from corralsim.corral import restart_cap


def two_arm_cfg(master="corral", bases=None, T=300, n_reps=2, seed=11, **kw):
    bases = bases or [BaseSpec(kind="ucb"), BaseSpec(kind="egreedy", c=4.0)]
    return ExperimentConfig(
        env=EnvSpec(kind="k_armed", means=[0.5, 0.45], noise=NoiseSpec("bernoulli")),
        master=MasterSpec(kind=master), bases=bases, T=T, n_reps=n_reps, seed=seed, **kw)


class TestGeometricGrid:
    def test_basic(self):
        assert make_geometric_grid(1, 8, 2) == [1, 2, 4, 8]

    def test_epsilon_grid_has_18_values(self):
        grid = make_geometric_grid(1, 2 * 50_000, 2)
        assert len(grid) == 18
        assert grid[-1] >= 100_000 > grid[-2]

    def test_degenerate_range(self):
        assert make_geometric_grid(1, 1, 2) == [1]

    def test_bad_factor(self):
        with pytest.raises(ConfigError):
            make_geometric_grid(1, 8, 1.0)
        with pytest.raises(ConfigError):
            make_geometric_grid(0.0, 8, 2.0)

    @given(lo=st.floats(1e-3, 10), ratio=st.floats(1, 50), factor=st.floats(1.1, 5))
    @settings(max_examples=50, deadline=None)
    def test_length_formula(self, lo, ratio, factor):
        hi = lo * ratio
        grid = make_geometric_grid(lo, hi, factor)
        assert len(grid) == math.ceil(math.log(hi / lo, factor) - 1e-9) + 1
        assert grid[0] == lo and grid[-1] >= hi


class TestPseudoRegret:
    def test_always_optimal_is_zero(self):
        series = pseudo_regret([0.5, 0.5, 0.5], [0.5, 0.5, 0.5])
        assert series.tolist() == [0.0, 0.0, 0.0]

    def test_additivity(self):
        series = pseudo_regret([0.5, 0.5], [0.45, 0.45])
        assert np.allclose(series, [0.05, 0.10])

    def test_uniform_policy_slope(self):
        # oracle: uniform over (0.5, 0.45) has expected gap 0.025 per step
        rng = np.random.default_rng(0)
        n = 100_000
        chosen = np.where(rng.random(n) < 0.5, 0.5, 0.45)
        series = pseudo_regret(np.full(n, 0.5), chosen)
        slope = series[-1] / n
        assert abs(slope - 0.025) < 0.0025

    def test_negative_gap_rejected(self):
        with pytest.raises(InvariantViolation):
            pseudo_regret([0.4], [0.5])


class TestSublinearitySlope:
    def test_linear_series(self):
        t = np.arange(1, 2001, dtype=float)
        assert sublinearity_slope(3.0 * t) == pytest.approx(1.0, abs=1e-6)

    def test_sqrt_series(self):
        t = np.arange(1, 2001, dtype=float)
        assert sublinearity_slope(2.0 * np.sqrt(t)) == pytest.approx(0.5, abs=1e-6)

    def test_two_thirds_series(self):
        t = np.arange(1, 2001, dtype=float)
        assert sublinearity_slope(0.7 * t ** (2 / 3)) == pytest.approx(2 / 3, abs=1e-3)

    def test_nonpositive_after_burn_in_rejected(self):
        series = np.ones(100)
        series[50] = 0.0
        with pytest.raises(ValueError):
            sublinearity_slope(series)

    def test_explicit_steps(self):
        steps = np.array([10.0, 100.0, 1000.0])
        series = 5.0 * steps ** 0.5
        assert sublinearity_slope(series, steps=steps, burn_frac=0.0) == pytest.approx(0.5)


class TestRunOnce:
    def test_single_base_corral_pins_probability(self):
        cfg = two_arm_cfg(bases=[BaseSpec(kind="ucb")], T=50, n_reps=1)
        rec = run_once(cfg, 0)
        assert rec.selection_counts.tolist() == [50]
        assert rec.final_p.tolist() == [1.0]

    def test_determinism_across_calls(self):
        cfg = two_arm_cfg(T=200)
        r1 = run_once(cfg, 0, collect_trace=True)
        r2 = run_once(cfg, 0, collect_trace=True)
        assert r1.trace == r2.trace
        assert r1.final_regret == r2.final_regret
        assert np.array_equal(r1.checkpoint_regret, r2.checkpoint_regret)

    def test_reps_differ(self):
        cfg = two_arm_cfg(T=200)
        assert run_once(cfg, 0).final_regret != run_once(cfg, 1).final_regret

    def test_row_count_and_cumulative_series(self):
        cfg = two_arm_cfg(T=150)
        rec = run_once(cfg, 0, collect_trace=True)
        assert len(rec.trace) == 2 * 150
        cums = [row[-1] for row in rec.trace]
        assert all(b >= a - 1e-12 for a, b in zip(cums, cums[1:]))
        env_steps = [row[2] for row in rec.trace]
        assert env_steps == list(range(1, 301))

    def test_exp3p_master_runs(self):
        cfg = two_arm_cfg(master="exp3p", T=200)
        rec = run_once(cfg, 0)
        assert rec.selection_counts.sum() == 200

    def test_restart_cap_honored(self):
        cfg = two_arm_cfg(T=2000, seed=3)
        rec = run_once(cfg, 0)
        cap = restart_cap(2000, 2)
        assert np.all(rec.restart_counts <= cap)

    def test_step2_gaps_recorded(self):
        cfg = two_arm_cfg(T=100)
        rec = run_once(cfg, 0)
        assert rec.step2_gaps.shape == (100,)
        assert np.all(rec.step2_gaps >= 0.0)

    def test_audit_mode_does_not_change_main_trace(self):
        base_cfg = two_arm_cfg(T=120)
        audit_cfg = two_arm_cfg(T=120, audit_term2=True)
        r_plain = run_once(base_cfg, 0, collect_trace=True)
        r_audit = run_once(audit_cfg, 0, collect_trace=True)
        assert r_plain.trace == r_audit.trace
        assert r_plain.audit is None
        # every unselected base idles twice per master round
        assert len(r_audit.audit) == 120 * (2 - 1) * 2

    def test_audit_disabled_produces_no_rows(self):
        rec = run_once(two_arm_cfg(T=50), 0)
        assert rec.audit is None


class TestDropHandling:
    def _corrupted_cfg(self, T=4000, drop_test=True):
        return two_arm_cfg(
            T=T, n_reps=1, seed=5, drop_test=drop_test,
            bases=[BaseSpec(kind="ucb", label="honest"),
                   BaseSpec(kind="ucb", feedback_inflation=1.0, label="corrupted")])

    def test_corrupted_base_gets_dropped(self):
        rec = run_once(self._corrupted_cfg(), 0)
        assert any(base == 1 for _, base, _ in rec.drop_events)

    def test_dropped_base_feeds_zero_and_probability_decays(self):
        rec = run_once(self._corrupted_cfg(), 0)
        t_drop, base, p_drop = rec.drop_events[0]
        assert rec.final_p[base] < p_drop

    def test_drop_test_can_be_disabled(self):
        rec = run_once(self._corrupted_cfg(drop_test=False), 0)
        assert rec.drop_events == []


class TestMonteCarlo:
    def test_single_rep_stats(self):
        stats = run_monte_carlo(two_arm_cfg(T=100, n_reps=1), n_jobs=1)
        assert stats.std_regret.tolist() == [0.0] * len(stats.std_regret)
        assert stats.final_mean == stats.final_regrets[0]

    def test_aggregation_matches_manual(self):
        cfg = two_arm_cfg(T=150, n_reps=4)
        stats = run_monte_carlo(cfg, n_jobs=1)
        finals = [run_once(cfg, rep).final_regret for rep in range(4)]
        assert np.allclose(sorted(stats.final_regrets), sorted(finals))
        assert stats.final_mean == pytest.approx(np.mean(finals))

    def test_quantiles_bracket_mean(self):
        stats = run_monte_carlo(two_arm_cfg(T=100, n_reps=5), n_jobs=1)
        qs = stats.final_quantiles()
        assert qs[0.0] <= stats.final_mean <= qs[1.0]

    def test_checkpoint_cadence(self):
        stats = run_monte_carlo(two_arm_cfg(T=500, n_reps=1), n_jobs=1)
        assert stats.checkpoint_steps[0] == 2 * (500 // 100)
        assert stats.checkpoint_steps[-1] == 1000
