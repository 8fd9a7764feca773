"""Immutable policy snapshots.

A snapshot is a frozen decision rule: applying it to an action set yields a
probability vector.  Snapshots are what the smoothing wrapper stores in its
replay history, so they must stay valid when re-applied to a fresh action set
(relevant when action sets are resampled each round).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environments import ActionSet
from .rng import sample_categorical


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FixedProbsPolicy:
    """Explicit distribution over a stable arm set."""

    probs: np.ndarray

    def probabilities(self, action_set: ActionSet | None = None) -> np.ndarray:
        if action_set is not None and action_set.k != len(self.probs):
            raise ValueError("action set size does not match policy")
        return self.probs

    def sample(self, rng, action_set: ActionSet | None = None) -> int:
        return sample_categorical(self.probabilities(action_set), rng)


@dataclass(frozen=True)
class LinearIndexPolicy:
    """Optimism-in-face-of-uncertainty rule frozen at one learner state.

    Scores each action by estimated mean plus a confidence width and puts all
    mass on the argmax; evaluating the rule on a new feature matrix is what
    makes replay on resampled action sets possible.
    """

    theta: np.ndarray
    vinv: np.ndarray
    beta: float

    def scores(self, action_set: ActionSet) -> np.ndarray:
        feats = action_set.features
        if feats is None:
            raise ValueError("linear policy needs action features")
        widths = np.sqrt(((feats @ self.vinv) * feats).sum(axis=1))
        return feats @ self.theta + self.beta * widths

    def probabilities(self, action_set: ActionSet) -> np.ndarray:
        probs = np.zeros(action_set.k)
        probs[int(np.argmax(self.scores(action_set)))] = 1.0
        return probs

    def sample(self, rng, action_set: ActionSet) -> int:
        # argmax rule: deterministic given the action set
        return int(np.argmax(self.scores(action_set)))


def point_mass(k: int, idx: int) -> FixedProbsPolicy:
    probs = np.zeros(k)
    probs[idx] = 1.0
    return FixedProbsPolicy(_frozen(probs))


def uniform_policy(k: int) -> FixedProbsPolicy:
    return FixedProbsPolicy(_frozen(np.full(k, 1.0 / k)))


def fixed_probs(probs) -> FixedProbsPolicy:
    return FixedProbsPolicy(_frozen(probs))


def make_linear_policy(theta, vinv, beta) -> LinearIndexPolicy:
    return LinearIndexPolicy(_frozen(theta), _frozen(vinv), float(beta))
