import math

import numpy as np
import pytest

from corralsim import InvariantViolation, KArmedEnv
from corralsim import rng as rngmod
from corralsim.bases import BoundDescriptor, UcbBase
from corralsim.smoothing import SmoothedBase, to_master_reward


def make_smoothed(coeff=1.0, alpha=0.5, k=2, apply_offset=True, inflation=0.0):
    return SmoothedBase(lambda: UcbBase(k), BoundDescriptor(alpha, coeff), k,
                        apply_offset=apply_offset, feedback_inflation=inflation)


def env2(sigma=0.0):
    return KArmedEnv([0.5, 0.45], noise="gaussian", sigma=sigma)


def g(seed=0, slot=0):
    return rngmod.stream(seed, 0, rngmod.BASE_PLAY, slot)


class TestSelectedRound:
    def test_first_selection_replays_uniform_history(self):
        # s=0 forces q=0 and the initial history entry is the uniform policy
        sm = make_smoothed()
        assert sm.policy_history[0].probabilities().tolist() == [0.5, 0.5]
        sm.selected_round(env2(), g())
        assert sm.s == 1 and sm.select_count == 1
        assert len(sm.policy_history) == 2
        assert sm.frozen_step2 is sm.policy_history[0]

    def test_offset_arithmetic(self):
        # oracle: U(4) = sqrt(4) = 2 at coeff 1, so offset U(4)/4 = 0.5
        sm = make_smoothed(coeff=1.0)
        env = KArmedEnv([0.8, 0.8], noise="gaussian", sigma=0.0)
        for _ in range(4):
            sm.selected_round(env, g())
        assert sm.s == 4
        modified, outs = sm.selected_round(env, g())
        assert outs[1].reward == 0.8
        assert modified == pytest.approx(0.8 - 0.5)

    def test_zero_coeff_degenerate_via_offset_flag(self):
        # offset disabled: the modified reward is exactly the step-2 reward
        sm = make_smoothed(apply_offset=False)
        env = KArmedEnv([0.6, 0.6], noise="gaussian", sigma=0.0)
        modified, outs = sm.selected_round(env, g())
        assert modified == outs[1].reward == 0.6

    def test_modified_never_exceeds_step2_reward(self):
        sm = make_smoothed(coeff=0.5)
        env = env2(sigma=1.0)
        rng = g(3)
        for _ in range(50):
            modified, outs = sm.selected_round(env, rng)
            assert modified <= outs[1].reward / env.reward_scale + 1e-12

    def test_history_is_append_only_and_replay_reproduces(self):
        sm = make_smoothed()
        env = env2(sigma=1.0)
        rng = g(4)
        snapshots = []
        for _ in range(20):
            sm.selected_round(env, rng)
            snapshots.append(sm.policy_history[-1])
        for q, snap in enumerate(snapshots, start=1):
            assert sm.policy_history[q] is snap
        # frozen replay index always points into history
        assert any(sm.frozen_step2 is p for p in sm.policy_history)

    def test_dropped_base_cannot_be_selected(self):
        sm = make_smoothed()
        sm.mark_dropped()
        with pytest.raises(InvariantViolation):
            sm.selected_round(env2(), g())

    def test_diff_stat_tracks_step_difference(self):
        sm = make_smoothed()
        env = KArmedEnv([0.7, 0.7], noise="gaussian", sigma=0.0)
        for _ in range(5):
            sm.selected_round(env, g())
        # identical means, zero noise:步 rewards equal, diff stays 0
        assert sm.diff_stat == pytest.approx(0.0)


class TestIdleRound:
    def test_idle_does_not_touch_learner_state(self):
        sm = make_smoothed()
        env = env2(sigma=1.0)
        rng = g(5)
        sm.selected_round(env, rng)
        before = (sm.s, sm.select_count, list(sm.inner.counts), sm.diff_stat)
        audit_rng = rngmod.stream(9, 0, rngmod.BASE_AUDIT)
        outs = sm.idle_round(env, audit_rng)
        assert len(outs) == 2
        assert (sm.s, sm.select_count, list(sm.inner.counts), sm.diff_stat) == before

    def test_frozen_policy_constant_between_idles(self):
        sm = make_smoothed()
        env = env2(sigma=1.0)
        sm.selected_round(env, g(6))
        frozen = sm.frozen_step2
        audit_rng = rngmod.stream(10, 0, rngmod.BASE_AUDIT)
        sm.idle_round(env, audit_rng)
        sm.idle_round(env, audit_rng)
        assert sm.frozen_step2 is frozen

    def test_optimal_point_mass_has_zero_gap(self):
        sm = make_smoothed()
        from corralsim.policies import point_mass
        sm.frozen_step2 = point_mass(2, 0)  # arm 0 is optimal at (0.5, 0.45)
        outs = sm.idle_round(env2(sigma=1.0), g(7))
        assert all(o.gap == 0.0 for o in outs)


class TestBaseTest:
    def test_zero_diff_keeps(self):
        sm = make_smoothed()
        sm.select_count = 10
        sm.diff_stat = 0.0
        assert not sm.base_test(10_000, 4, 1e-4)

    def test_threshold_arithmetic(self):
        # oracle: threshold = 10 + 2*sqrt(200*ln(1.6e9)) at l=100, T=1e4, M=4,
        # delta=1e-4, U(l) = sqrt(l) * 10 for coeff 1
        sm = make_smoothed(coeff=1.0)
        sm.select_count = 100
        threshold = 10.0 + 2.0 * math.sqrt(200.0 * math.log(1.6e9))
        sm.diff_stat = threshold - 1e-6
        assert not sm.base_test(10_000, 4, 1e-4)
        sm.diff_stat = threshold + 1e-6
        assert sm.base_test(10_000, 4, 1e-4)

    def test_needs_at_least_one_selection(self):
        sm = make_smoothed()
        sm.diff_stat = 1e9
        assert not sm.base_test(100, 2, 0.01)


class TestRestart:
    def test_restart_resets_to_uniform(self):
        sm = make_smoothed()
        env = env2(sigma=1.0)
        rng = g(8)
        for _ in range(10):
            sm.selected_round(env, rng)
        sm.restart()
        assert sm.s == 0 and sm.select_count == 0
        assert sm.diff_stat == 0.0
        assert len(sm.policy_history) == 1
        assert sm.policy_history[0].probabilities().tolist() == [0.5, 0.5]
        assert sm.inner.t == 0

    def test_restart_idempotent(self):
        sm = make_smoothed()
        sm.selected_round(env2(), g())
        sm.restart()
        state1 = (sm.s, sm.select_count, sm.diff_stat, len(sm.policy_history))
        sm.restart()
        assert (sm.s, sm.select_count, sm.diff_stat, len(sm.policy_history)) == state1

    def test_restart_preserves_dropped(self):
        sm = make_smoothed()
        sm.mark_dropped()
        sm.restart()
        assert sm.dropped


class TestFeedbackMap:
    def test_offset_map_is_affine_clip(self):
        assert to_master_reward(-5.0) == 0.0
        assert to_master_reward(1.0) == 1.0
        assert to_master_reward(0.0) == 0.5
        assert to_master_reward(0.3) == pytest.approx(0.65)

    def test_plain_map_is_clip01(self):
        assert to_master_reward(-0.2, offset_applied=False) == 0.0
        assert to_master_reward(0.3, offset_applied=False) == pytest.approx(0.3)
        assert to_master_reward(1.7, offset_applied=False) == 1.0

    def test_maps_are_monotone(self):
        xs = np.linspace(-2, 2, 41)
        for offset in (True, False):
            ys = [to_master_reward(x, offset) for x in xs]
            assert all(a <= b + 1e-15 for a, b in zip(ys, ys[1:]))


def test_feedback_inflation_shifts_diff_stat():
    honest = make_smoothed(apply_offset=False)
    corrupt = make_smoothed(apply_offset=False, inflation=0.5)
    env = KArmedEnv([0.6, 0.6], noise="gaussian", sigma=0.0)
    for _ in range(10):
        honest.selected_round(env, g(11))
        corrupt.selected_round(env, g(11))
    assert honest.diff_stat == pytest.approx(0.0)
    assert corrupt.diff_stat == pytest.approx(5.0)
