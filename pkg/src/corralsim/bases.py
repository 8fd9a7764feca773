"""Stochastic base learners and their regret-bound descriptors.

All learners share one contract: ``propose(action_set)`` returns an immutable
policy snapshot of the current state without mutating anything, and
``observe(action_set, arm, reward)`` folds one observation into the state.
Proposals are cached between observations, so repeated calls are cheap and
literally identical objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environments import ActionSet
from .errors import ConfigError
from .policies import fixed_probs, make_linear_policy, point_mass, uniform_policy


@dataclass(frozen=True)
class BoundDescriptor:
    """Power-law regret envelope U(t) = coeff * t**alpha at the run's fixed delta.

    alpha < 1 makes U(t)/t nonincreasing, which is what the smoothing wrapper
    and the drop test rely on.
    """

    alpha: float
    coeff: float

    def __post_init__(self):
        if not 0.5 <= self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in [1/2, 1), got {self.alpha}")
        if not self.coeff > 0.0:
            raise ConfigError(f"coeff must be positive, got {self.coeff}")

    def value(self, t: float) -> float:
        return self.coeff * t ** self.alpha

    def per_step(self, s: int) -> float:
        """U(s)/s, with the s=0 singularity defined as U(1)/1."""
        if s <= 0:
            return self.value(1)
        return self.value(s) / s


def bound_descriptor(base_kind: str, k: int, d: int, delta: float, horizon: int) -> BoundDescriptor:
    """High-probability regret envelope for a base kind at fixed delta."""
    if not (k > 0 and delta > 0 and horizon > 0):
        raise ConfigError("k, delta and horizon must be positive")
    log_inv_delta = math.log(1.0 / delta)
    if base_kind == "ucb":
        return BoundDescriptor(0.5, math.sqrt(k) * math.log(horizon * k / delta))
    if base_kind == "linucb":
        if d <= 0:
            raise ConfigError("linucb needs a positive feature dimension")
        return BoundDescriptor(0.5, d * log_inv_delta)
    if base_kind == "egreedy":
        if k == 2:
            return BoundDescriptor(0.5, 16.0 * math.sqrt(log_inv_delta))
        # sum of gaps replaced by its worst case k
        return BoundDescriptor(2.0 / 3.0, 20.0 * (k * log_inv_delta * k) ** (1.0 / 3.0))
    if base_kind == "exp3":
        return BoundDescriptor(0.5, math.sqrt(k) * math.log(horizon * k / delta))
    raise ConfigError(f"unknown base kind {base_kind!r}")


def _check_reward(reward: float) -> None:
    if not math.isfinite(reward):
        raise ValueError(f"non-finite reward {reward}")


class UcbBase:
    """UCB1-style index learner with the anytime exploration term sqrt(2 ln(t^3)/n).

    Counts and sums live in plain lists: single observations arrive one at a
    time and per-element float math beats numpy dispatch at these sizes.
    """

    kind = "ucb"

    def __init__(self, k: int):
        self.k = k
        self.counts = [0] * k
        self.sums = [0.0] * k
        self.t = 0
        self._snap = None

    def index(self, arm: int) -> float:
        n = self.counts[arm]
        if n == 0:
            return math.inf
        return self.sums[arm] / n + math.sqrt(2.0 * math.log(self.t ** 3) / n)

    def _best(self) -> int:
        # ties (including several unpulled arms) break toward the lowest index
        best, best_val = 0, -math.inf
        bonus = 2.0 * math.log(self.t ** 3) if self.t >= 1 else 0.0
        for arm in range(self.k):
            n = self.counts[arm]
            if n == 0:
                return arm
            val = self.sums[arm] / n + math.sqrt(bonus / n)
            if val > best_val:
                best, best_val = arm, val
        return best

    def propose(self, action_set: ActionSet):
        if self._snap is None:
            self._snap = point_mass(self.k, self._best())
        return self._snap

    def act(self, action_set: ActionSet, rng) -> int:
        return self._best()

    def observe(self, action_set: ActionSet, arm: int, reward: float) -> None:
        _check_reward(reward)
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.t += 1
        self._snap = None


class EGreedyBase:
    """Epsilon-greedy with the decaying schedule eps_t = min(1, c/t)."""

    kind = "egreedy"

    def __init__(self, k: int, c: float):
        if c <= 0:
            raise ConfigError("exploration scale c must be positive")
        self.k = k
        self.c = float(c)
        self.counts = [0] * k
        self.sums = [0.0] * k
        self.t = 0
        self._snap = None

    def epsilon(self) -> float:
        if self.t == 0:
            return 1.0
        return min(1.0, self.c / self.t)

    def _greedy(self) -> int:
        best, best_val = 0, -math.inf
        for arm in range(self.k):
            n = self.counts[arm]
            if n == 0:
                return arm  # unpulled arms count as +inf, lowest index wins
            val = self.sums[arm] / n
            if val > best_val:
                best, best_val = arm, val
        return best

    def propose(self, action_set: ActionSet):
        if self._snap is None:
            eps = self.epsilon()
            probs = np.full(self.k, eps / self.k)
            probs[self._greedy()] += 1.0 - eps
            self._snap = fixed_probs(probs)
        return self._snap

    def act(self, action_set: ActionSet, rng) -> int:
        # same mixture as propose: uniform with prob eps, else the greedy arm
        if rng.random() < self.epsilon():
            return min(int(rng.random() * self.k), self.k - 1)
        return self._greedy()

    def observe(self, action_set: ActionSet, arm: int, reward: float) -> None:
        _check_reward(reward)
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.t += 1
        self._snap = None


class Exp3Base:
    """EXP3 with anytime learning rate sqrt(ln k/(t k)) and 1/sqrt(t k) uniform mixing."""

    kind = "exp3"

    def __init__(self, k: int):
        self.k = k
        self.gains = np.zeros(k)
        self.t = 0
        self._snap = None

    def _probs(self) -> np.ndarray:
        if self.t == 0:
            return np.full(self.k, 1.0 / self.k)
        rate = math.sqrt(math.log(self.k) / (self.t * self.k))
        z = rate * self.gains
        w = np.exp(z - z.max())
        mix = min(1.0, 1.0 / math.sqrt(self.t * self.k))
        return (1.0 - mix) * (w / w.sum()) + mix / self.k

    def propose(self, action_set: ActionSet):
        if self._snap is None:
            self._snap = fixed_probs(self._probs())
        return self._snap

    def act(self, action_set: ActionSet, rng) -> int:
        return self.propose(action_set).sample(rng, action_set)

    def observe(self, action_set: ActionSet, arm: int, reward: float) -> None:
        _check_reward(reward)
        played = self.propose(action_set).probs[arm]
        self.gains[arm] += reward / played
        self.t += 1
        self._snap = None


class LinUcbBase:
    """Ridge-regression optimism over action features (OFUL-style widths).

    ``misspec_eps > 0`` additively inflates the confidence radius by
    eps * sqrt(t), the knob used to instantiate a grid of misspecification
    tolerances.
    """

    kind = "linucb"

    def __init__(self, k: int, d: int, conf_delta: float, reg_lambda: float = 1.0,
                 misspec_eps: float = 0.0):
        if reg_lambda <= 0:
            raise ConfigError("reg_lambda must be positive to keep the Gram matrix PD")
        self.k = k
        self.d = d
        self.conf_delta = float(conf_delta)
        self.reg_lambda = float(reg_lambda)
        self.misspec_eps = float(misspec_eps)
        self.gram = reg_lambda * np.eye(d)
        self.moment = np.zeros(d)
        self.t = 0
        self._snap = None

    def beta(self) -> float:
        # S = 1 norm bound on theta_star, unit noise scale
        radius = math.sqrt(self.reg_lambda) + math.sqrt(
            2.0 * math.log(1.0 / self.conf_delta)
            + self.d * math.log(1.0 + self.t / (self.reg_lambda * self.d))
        )
        return radius + self.misspec_eps * math.sqrt(self.t)

    def _vinv(self) -> np.ndarray:
        if self.d == 2:  # closed form; np.linalg.inv overhead dominates at d=2
            a, b = self.gram[0]
            c, d = self.gram[1]
            det = a * d - b * c
            return np.array(((d / det, -b / det), (-c / det, a / det)))
        return np.linalg.inv(self.gram)

    def width(self, features: np.ndarray) -> float:
        vinv = self._vinv()
        return self.beta() * math.sqrt(float(features @ vinv @ features))

    def propose(self, action_set: ActionSet):
        if self._snap is None:
            vinv = self._vinv()
            theta = vinv @ self.moment
            self._snap = make_linear_policy(theta, vinv, self.beta())
        return self._snap

    def act(self, action_set: ActionSet, rng) -> int:
        return self.propose(action_set).sample(rng, action_set)

    def observe(self, action_set: ActionSet, arm: int, reward: float) -> None:
        _check_reward(reward)
        a = action_set.features[arm]
        self.gram += np.outer(a, a)
        self.moment += a * reward
        self.t += 1
        self._snap = None


def make_base(kind: str, k: int, d: int, delta: float, *, c: float | None = None,
              misspec_eps: float = 0.0, reg_lambda: float = 1.0):
    if kind == "ucb":
        return UcbBase(k)
    if kind == "egreedy":
        if c is None:
            raise ConfigError("egreedy base needs exploration scale c")
        return EGreedyBase(k, c)
    if kind == "exp3":
        return Exp3Base(k)
    if kind == "linucb":
        return LinUcbBase(k, d, conf_delta=delta, reg_lambda=reg_lambda,
                          misspec_eps=misspec_eps)
    raise ConfigError(f"unknown base kind {kind!r}")


__all__ = [
    "BoundDescriptor",
    "bound_descriptor",
    "UcbBase",
    "EGreedyBase",
    "Exp3Base",
    "LinUcbBase",
    "make_base",
    "uniform_policy",
]
