"""Two-step smoothing wrapper around a base learner.

Each time the wrapper is selected it plays two environment steps: step 1 runs
the base's current policy and updates the base; step 2 replays a policy drawn
uniformly from the wrapper's whole history (state counter s, replay index
q ~ Uniform{0..s}).  Averaging over history is what turns a cumulative regret
envelope U(t) into a per-step envelope U(t)/t for the replayed step.

The reward reported upward is the step-2 reward minus U(s)/s in scaled units,
so a base is credited only for performance beyond its claimed envelope.  The
running sum of (step-2 minus step-1) rewards feeds the drop test: a base whose
replayed history beats its current policy by more than the envelope plus
martingale slack cannot have been in an environment where its bound holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bases import BoundDescriptor
from .errors import InvariantViolation
from .policies import uniform_policy


@dataclass(frozen=True)
class StepOutcome:
    """One environment step as recorded by the wrapper (unscaled units)."""

    step_kind: int
    action: int
    reward: float
    mean_reward: float
    step_optimum: float

    @property
    def gap(self) -> float:
        return self.step_optimum - self.mean_reward


def to_master_reward(modified: float, offset_applied: bool = True) -> float:
    """Map a modified reward into the master's [0, 1] range.

    With the envelope offset applied the reward can be as low as -U(1), so it
    is clipped to [-1, 1] and affinely mapped via (r+1)/2; both steps are
    monotone, preserving the ordering the master cares about.  Without the
    offset the reward already lives near [0, 1] and a plain clip avoids
    halving the differences between bases.
    """
    if offset_applied:
        return (min(1.0, max(-1.0, modified)) + 1.0) / 2.0
    return min(1.0, max(0.0, modified))


class SmoothedBase:
    def __init__(self, factory, bound: BoundDescriptor, k: int, *,
                 apply_offset: bool = True, resample_replay: bool = False,
                 feedback_inflation: float = 0.0):
        self.factory = factory
        self.bound = bound
        self.k = k
        self.apply_offset = apply_offset
        self.resample_replay = resample_replay
        self.feedback_inflation = float(feedback_inflation)
        self.inner = factory()
        self._uniform = uniform_policy(k)
        self.policy_history = [self._uniform]
        self.frozen_step2 = self._uniform
        self.s = 0
        self.select_count = 0
        self.diff_stat = 0.0
        self.dropped = False

    def _play(self, policy, env, rng, step_kind: int) -> StepOutcome:
        aset = env.sample_action_set(rng)
        action = policy.sample(rng, aset)
        reward = env.draw_reward(aset, action, rng)
        return StepOutcome(step_kind, action, reward,
                           float(env.mean_rewards(aset)[action]),
                           env.per_step_optimum(aset))

    def selected_round(self, env, rng):
        """Play both steps, update the base, and return the modified feedback.

        Returns (modified scaled step-2 reward, [step-1 outcome, step-2 outcome]).
        """
        if self.dropped:
            raise InvariantViolation("selected_round called on a dropped base")
        scale = env.reward_scale

        # step 1: current policy, learner update
        aset1 = env.sample_action_set(rng)
        pol1 = self.inner.propose(aset1)
        a1 = pol1.sample(rng, aset1)
        r1 = env.draw_reward(aset1, a1, rng)
        out1 = StepOutcome(1, a1, r1, float(env.mean_rewards(aset1)[a1]),
                           env.per_step_optimum(aset1))
        self.inner.observe(aset1, a1, r1)

        # step 2: uniform replay from history, no learner update
        q = int(rng.integers(0, self.s + 1))
        self.frozen_step2 = self.policy_history[q]
        out2 = self._play(self.frozen_step2, env, rng, 2)

        r1s = r1 / scale
        r2s = out2.reward / scale + self.feedback_inflation
        self.diff_stat += r2s - r1s
        modified = r2s - (self.bound.per_step(self.s) if self.apply_offset else 0.0)

        self.s += 1
        self.select_count += 1
        self.policy_history.append(self.inner.propose(aset1))
        return modified, [out1, out2]

    def idle_round(self, env, rng):
        """Audit-only playback of the frozen step-2 policy (two steps, no updates).

        Uses its own rng stream, so enabling the audit cannot perturb the run.
        """
        policy = self.frozen_step2
        if self.resample_replay:
            q = int(rng.integers(0, self.s + 1))
            policy = self.policy_history[q]
        return [self._play(policy, env, rng, kind) for kind in (1, 2)]

    def frozen_round(self, env, rng):
        """Two environment steps with the frozen policy for a dropped base that
        the master selected anyway; its feedback is pinned to zero upstream."""
        return [self._play(self.frozen_step2, env, rng, kind) for kind in (1, 2)]

    def base_test(self, horizon: int, n_bases: int, delta: float) -> bool:
        """True when the base should be dropped.

        Compares the accumulated step-2 minus step-1 reward sum against the
        claimed envelope plus Azuma slack at the current selection count.
        """
        l = self.select_count
        if l < 1:
            return False
        slack = 2.0 * math.sqrt(2.0 * l * math.log(4.0 * horizon * n_bases / delta))
        return self.diff_stat > self.bound.value(l) + slack

    def mark_dropped(self) -> None:
        self.dropped = True

    def restart(self) -> None:
        """Reset to a fresh learner segment; a dropped base stays dropped."""
        self.inner = self.factory()
        self.policy_history = [self._uniform]
        self.frozen_step2 = self._uniform
        self.s = 0
        self.select_count = 0
        self.diff_stat = 0.0
