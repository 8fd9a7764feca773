"""EXP3.P master: softmax over optimistically-biased cumulative gain estimates
with a uniform exploration floor.

Probabilities are recomputed as (1 - M p) softmax(gains) + p, which keeps the
vector normalized and every coordinate at or above the exploration floor p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rng import sample_categorical


@dataclass
class Exp3pState:
    cum_gain: np.ndarray
    p_explore: float
    probs: np.ndarray

    @property
    def n_bases(self) -> int:
        return len(self.probs)


def default_p_explore(horizon: int, n_bases: int, alpha: float | None = None) -> float:
    """Theory-guided exploration floor, capped at 1/(2M).

    With a known envelope exponent alpha the floor is
    T^(-(1-alpha)/(2-alpha)) * M^(-1/(2-alpha)); otherwise T^(-1/3).
    """
    if alpha is None:
        p = horizon ** (-1.0 / 3.0)
    else:
        p = horizon ** (-(1.0 - alpha) / (2.0 - alpha)) * n_bases ** (-1.0 / (2.0 - alpha))
    return min(p, 1.0 / (2.0 * n_bases))


def init_exp3p(n_bases: int, p_explore: float) -> Exp3pState:
    if not 0.0 < p_explore <= 1.0 / (2.0 * n_bases):
        raise ConfigError(f"p_explore must lie in (0, 1/(2M)], got {p_explore}")
    return Exp3pState(
        cum_gain=np.zeros(n_bases),
        p_explore=float(p_explore),
        probs=np.full(n_bases, 1.0 / n_bases),
    )


def exp3p_update(state: Exp3pState, chosen: int, reward: float) -> None:
    """Fold one observed reward (already mapped into [0, 1]) into the state.

    Every base receives the optimistic bias p/2 divided by its probability;
    the chosen base additionally receives its importance-weighted reward.
    """
    m = state.n_bases
    if not 0 <= chosen < m:
        raise ValueError(f"chosen base {chosen} out of range")
    gain = (state.p_explore / 2.0) / state.probs
    gain[chosen] += reward / state.probs[chosen]
    state.cum_gain += gain

    z = state.cum_gain - state.cum_gain.max()  # overflow-safe softmax
    w = np.exp(z)
    state.probs = (1.0 - m * state.p_explore) * (w / w.sum()) + state.p_explore


def sample_base(state: Exp3pState, rng) -> int:
    return sample_categorical(state.probs, rng)
