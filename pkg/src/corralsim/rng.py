"""Deterministic random-stream management.

Every consumer of randomness (environment, each base, the master, per-base
audit playback) owns an independent counter-based Philox stream derived from
(root seed, repetition index, role, slot).  Streams never interleave, so
whether some component draws or not cannot perturb another component's
sequence; repetitions are reproducible independently of execution order.
"""

from __future__ import annotations

import numpy as np

# Role tags for spawn keys.  Values are part of the reproducibility contract:
# changing them changes every derived stream.
ENV_BUILD = 0
ENV_PLAY = 1
MASTER = 2
BASE_PLAY = 3
BASE_AUDIT = 4


def stream(root_seed: int, rep: int, role: int, slot: int = 0) -> np.random.Generator:
    """Independent generator for (root seed, repetition, role, slot)."""
    ss = np.random.SeedSequence(int(root_seed), spawn_key=(int(rep), int(role), int(slot)))
    return np.random.Generator(np.random.Philox(ss))


def sample_categorical(probs, rng: np.random.Generator) -> int:
    """Draw an index from a probability vector by inverse-CDF walk.

    Accepts vectors summing to 1 only within float tolerance (the final index
    absorbs any shortfall).  One uniform draw per call regardless of outcome,
    which keeps stream consumption policy-independent.
    """
    u = rng.random()
    acc = 0.0
    last = len(probs) - 1
    for i in range(last):
        acc += probs[i]
        if u < acc:
            return i
    return last
