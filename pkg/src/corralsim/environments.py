"""Stochastic environments.

Each environment exposes:

* ``sample_action_set(rng)`` -- the action set for one step (fixed or resampled),
* ``mean_rewards(action_set)`` -- exact unscaled mean reward per action,
* ``draw_reward(action_set, idx, rng)`` -- noisy observed reward,
* ``per_step_optimum(action_set)`` -- best mean, used only for regret accounting,
* ``reward_scale`` -- divisor mapping means into [0, 1] for the learner pipeline.

Environments hold only fixed parameters; all randomness flows through the rng
argument, so instances are trivially safe to share read-only and a run's
determinism is governed entirely by its streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ActionSet:
    """One round's actions: stable integer ids plus optional feature rows."""

    arm_ids: np.ndarray
    features: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.arm_ids)


def _check_action(action_set: ActionSet, idx: int) -> None:
    if not 0 <= idx < action_set.k:
        raise ValueError(f"action index {idx} not in action set of size {action_set.k}")


class KArmedEnv:
    """Fixed finite arm set with Bernoulli or Gaussian reward noise."""

    def __init__(self, means, noise: str = "gaussian", sigma: float = 1.0):
        means = np.asarray(means, dtype=float)
        if means.ndim != 1 or len(means) < 2:
            raise ConfigError("KArmedEnv needs at least 2 arms")
        if np.any(means < 0.0) or np.any(means > 1.0):
            raise ConfigError("KArmedEnv means must lie in [0, 1]")
        if noise not in ("bernoulli", "gaussian"):
            raise ConfigError(f"unknown noise kind {noise!r}")
        if sigma < 0.0:
            raise ConfigError("gaussian sigma must be >= 0")
        self.means = means
        self.noise = noise
        self.sigma = float(sigma)
        self.reward_scale = 1.0
        self._action_set = ActionSet(np.arange(len(means)))
        self._means_list = [float(m) for m in means]
        self._opt = float(means.max())
        self._bernoulli = noise == "bernoulli"

    @property
    def k(self) -> int:
        return len(self.means)

    def sample_action_set(self, rng) -> ActionSet:
        return self._action_set

    def mean_rewards(self, action_set: ActionSet) -> np.ndarray:
        return self.means

    def mean_reward(self, action_set: ActionSet, idx: int) -> float:
        return self._means_list[idx]

    def draw_reward(self, action_set: ActionSet, idx: int, rng) -> float:
        _check_action(action_set, idx)
        mean = self._means_list[idx]
        if self._bernoulli:
            return float(rng.random() < mean)
        return mean + self.sigma * rng.standard_normal()

    def per_step_optimum(self, action_set: ActionSet) -> float:
        if action_set.k == 0:
            raise ValueError("empty action set has no optimum")
        return self._opt


class LinearContextualEnv:
    """Mean reward of an arm is the inner product of its features with theta_star."""

    def __init__(self, theta_star, arm_features, action_set_mode: str = "fixed",
                 noise_sigma: float = 1.0):
        theta_star = np.asarray(theta_star, dtype=float)
        arm_features = np.asarray(arm_features, dtype=float)
        if np.linalg.norm(theta_star) > 1.0 + 1e-9:
            raise ConfigError("theta_star must have l2 norm <= 1")
        if arm_features.ndim != 2 or arm_features.shape[1] != len(theta_star):
            raise ConfigError("arm_features must be (k, d) with d = len(theta_star)")
        if action_set_mode not in ("fixed", "iid_resample"):
            raise ConfigError(f"unknown action_set_mode {action_set_mode!r}")
        self.theta_star = theta_star
        self.arm_features = arm_features
        self.action_set_mode = action_set_mode
        self.noise_sigma = float(noise_sigma)
        self._arm_ids = np.arange(arm_features.shape[0])
        self._fixed_set = None
        self._fixed_means = None
        self._fixed_opt = None
        if action_set_mode == "fixed":
            self._fixed_set = ActionSet(self._arm_ids, arm_features)
            self._fixed_means = arm_features @ theta_star
            self._fixed_opt = float(self._fixed_means.max())
            top = self._fixed_opt
        else:
            # feature entries lie in [0, 1], so the largest attainable mean is
            # the sum of positive theta components
            top = float(np.sum(np.clip(theta_star, 0.0, None)))
        self.reward_scale = max(1.0, top)

    @property
    def k(self) -> int:
        return self.arm_features.shape[0]

    @property
    def d(self) -> int:
        return self.arm_features.shape[1]

    def sample_action_set(self, rng) -> ActionSet:
        if self.action_set_mode == "fixed":
            return self._fixed_set
        fresh = rng.random((self.k, self.d))
        return ActionSet(self._arm_ids, fresh)

    def mean_rewards(self, action_set: ActionSet) -> np.ndarray:
        if action_set is self._fixed_set:
            return self._fixed_means
        return action_set.features @ self.theta_star

    def draw_reward(self, action_set: ActionSet, idx: int, rng) -> float:
        _check_action(action_set, idx)
        mean = float(self.mean_rewards(action_set)[idx])
        return mean + self.noise_sigma * rng.standard_normal()

    def per_step_optimum(self, action_set: ActionSet) -> float:
        if action_set.k == 0:
            raise ValueError("empty action set has no optimum")
        if action_set is self._fixed_set:
            return self._fixed_opt
        return float(np.max(self.mean_rewards(action_set)))


class MisspecifiedLinearEnv:
    """Linear environment with bounded per-arm deviations from the linear model."""

    def __init__(self, base: LinearContextualEnv, perturbation, eps_star: float):
        perturbation = np.asarray(perturbation, dtype=float)
        if eps_star < 0.0:
            raise ConfigError("eps_star must be >= 0")
        if base.action_set_mode != "fixed":
            raise ConfigError("misspecified env requires a fixed action set")
        if perturbation.shape != (base.k,):
            raise ConfigError("perturbation must have one offset per arm")
        if np.max(np.abs(perturbation)) > eps_star + 1e-12:
            raise ConfigError("perturbation exceeds declared eps_star")
        self.base = base
        self.perturbation = perturbation
        self.eps_star = float(eps_star)
        self._means = base.arm_features @ base.theta_star + perturbation
        self._opt = float(self._means.max())
        self.reward_scale = max(1.0, float(np.max(np.abs(self._means))))

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def d(self) -> int:
        return self.base.d

    def sample_action_set(self, rng) -> ActionSet:
        return self.base.sample_action_set(rng)

    def mean_rewards(self, action_set: ActionSet) -> np.ndarray:
        return self._means

    def draw_reward(self, action_set: ActionSet, idx: int, rng) -> float:
        _check_action(action_set, idx)
        return float(self._means[idx] + self.base.noise_sigma * rng.standard_normal())

    def per_step_optimum(self, action_set: ActionSet) -> float:
        if action_set.k == 0:
            raise ValueError("empty action set has no optimum")
        return self._opt


class NonlinearArmsEnv:
    """Arm means are arbitrary; feature rows exist but carry no information.

    A linear-model learner is wrong here by construction, which is the point:
    it is the mismatched half of the model-selection experiment.
    """

    def __init__(self, mu, arm_features, noise_sigma: float = 1.0,
                 reward_scale: float | None = None):
        mu = np.asarray(mu, dtype=float)
        arm_features = np.asarray(arm_features, dtype=float)
        if arm_features.shape[0] != len(mu):
            raise ConfigError("need one feature row per arm")
        self.mu = mu
        self.arm_features = arm_features
        self.noise_sigma = float(noise_sigma)
        if reward_scale is None:
            reward_scale = max(1.0, float(np.max(np.abs(mu))))
        self.reward_scale = float(reward_scale)
        self._action_set = ActionSet(np.arange(len(mu)), arm_features)
        self._mu_list = [float(m) for m in mu]
        self._opt = float(mu.max())

    @property
    def k(self) -> int:
        return len(self.mu)

    @property
    def d(self) -> int:
        return self.arm_features.shape[1]

    def sample_action_set(self, rng) -> ActionSet:
        return self._action_set

    def mean_rewards(self, action_set: ActionSet) -> np.ndarray:
        return self.mu

    def draw_reward(self, action_set: ActionSet, idx: int, rng) -> float:
        _check_action(action_set, idx)
        return self._mu_list[idx] + self.noise_sigma * rng.standard_normal()

    def per_step_optimum(self, action_set: ActionSet) -> float:
        if action_set.k == 0:
            raise ValueError("empty action set has no optimum")
        return self._opt


def per_step_optimum(env, action_set: ActionSet) -> float:
    """Best attainable mean reward on this action set (regret benchmark only)."""
    if action_set.k == 0:
        raise ValueError("empty action set has no optimum")
    return float(np.max(env.mean_rewards(action_set)))
