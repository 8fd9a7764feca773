"""CORRAL master: log-barrier online mirror descent over base probabilities
with per-base increasing learning rates, probability-floor halving, and
restart signals.

Convention: the master minimizes losses.  A reward r in [0, 1] enters as loss
1 - r; only the selected base's loss is observed and it is importance-weighted
by the selection probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation
from .rng import sample_categorical

_SIMPLEX_TOL = 1e-9


@dataclass
class CorralState:
    p: np.ndarray
    eta: np.ndarray
    p_floor: np.ndarray
    gamma: float
    beta: float
    restart_counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.restart_counts is None:
            self.restart_counts = np.zeros(len(self.p), dtype=np.int64)

    @property
    def n_bases(self) -> int:
        return len(self.p)


def init_corral(n_bases: int, horizon: int, eta0: float | None = None) -> CorralState:
    """Initial state: uniform probabilities, floors 1/(2M), gamma = 1/T,
    learning-rate growth factor beta = e^(1/ln T)."""
    if eta0 is None:
        eta0 = math.sqrt(n_bases / horizon)
    log_t = max(1.0, math.log(horizon))
    return CorralState(
        p=np.full(n_bases, 1.0 / n_bases),
        eta=np.full(n_bases, float(eta0)),
        p_floor=np.full(n_bases, 1.0 / (2.0 * n_bases)),
        gamma=1.0 / horizon,
        beta=math.exp(1.0 / log_t),
    )


def restart_cap(horizon: int, n_bases: int) -> int:
    """Upper bound on restarts per base: floors start at 1/(2M), halve on each
    restart, and probabilities never fall below gamma/M = 1/(TM)."""
    return math.ceil(math.log2(horizon)) + math.ceil(math.log2(2 * n_bases))


def log_barrier_omd(p, loss, eta) -> np.ndarray:
    """One log-barrier mirror-descent step.

    Solves for the normalizer lambda in [min loss, max loss] such that
    sum_j 1/(1/p_j + eta_j (loss_j - lambda)) = 1 and returns the new simplex
    point 1/(1/p_j + eta_j (loss_j - lambda)).

    The residual is strictly increasing in lambda wherever all denominators
    stay positive, so bisection is bracketed; the upper end is pulled below
    the first denominator zero when one lies inside the loss range.  The
    search runs on plain floats: it sits on the hot path of every master
    round and numpy dispatch would dominate it.
    """
    p_l = [float(x) for x in p]
    loss_l = [float(x) for x in loss]
    eta_l = [float(x) for x in eta]
    if min(eta_l) <= 0.0:
        raise ValueError("learning rates must be strictly positive")
    if min(p_l) <= 0.0 or abs(sum(p_l) - 1.0) > 1e-6:
        raise ValueError("p must be a strictly positive probability vector")

    lo = min(loss_l)
    hi = max(loss_l)
    if hi - lo <= 1e-15:
        # equal losses: lambda = loss makes every denominator 1/p_j
        return np.array(p_l)

    inv_p = [1.0 / x for x in p_l]
    coords = list(zip(inv_p, eta_l, loss_l))
    # denominator of coordinate j hits zero at loss_j + 1/(eta_j p_j)
    crit = min(l + ip / e for ip, e, l in coords)
    if crit <= hi:
        hi = lo + (crit - lo) * (1.0 - 1e-12)

    def residual(lam: float) -> float:
        acc = 0.0
        for ip, e, l in coords:
            acc += 1.0 / (ip + e * (l - lam))
        return acc - 1.0

    r_lo = residual(lo)
    r_hi = residual(hi)
    if r_lo > 1e-9 or r_hi < -1e-9:
        raise InvariantViolation(
            f"log-barrier residual not bracketed: r({lo})={r_lo}, r({hi})={r_hi}")

    for _ in range(200):
        lam = 0.5 * (lo + hi)
        if residual(lam) < 0.0:
            lo = lam
        else:
            hi = lam
        if hi - lo <= 1e-12:
            break
    lam = 0.5 * (lo + hi)

    new_p = np.array([1.0 / (ip + e * (l - lam)) for ip, e, l in coords])
    if abs(new_p.sum() - 1.0) > _SIMPLEX_TOL:
        raise InvariantViolation(f"OMD residual {new_p.sum() - 1.0} above tolerance")
    return new_p


def corral_update(state: CorralState, chosen: int, loss_scalar: float) -> list[int]:
    """Importance-weighted loss update followed by gamma-mixing and floor upkeep.

    Returns the indices of bases whose floor halved this round; the harness
    restarts those bases.
    """
    m = state.n_bases
    if not 0 <= chosen < m:
        raise ValueError(f"chosen base {chosen} out of range")
    loss_vec = np.zeros(m)
    loss_vec[chosen] = loss_scalar / state.p[chosen]

    new_p = log_barrier_omd(state.p, loss_vec, state.eta)
    new_p /= new_p.sum()  # remove residual drift before mixing
    state.p = (1.0 - state.gamma) * new_p + state.gamma / m

    restarts = []
    for j in range(m):
        if state.p_floor[j] > state.p[j]:
            state.p_floor[j] = state.p[j] / 2.0
            state.eta[j] *= state.beta
            state.restart_counts[j] += 1
            restarts.append(j)
    return restarts


def sample_base(state, rng) -> int:
    """Categorical draw of a base index from the master's current distribution."""
    probs = state.p if isinstance(state, CorralState) else state.probs
    return sample_categorical(probs, rng)
