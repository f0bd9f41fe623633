"""Seed derivation: one master seed, child seeds keyed by integer paths.

Child seeds depend only on (master, key path), never on call order, so work
split across processes draws the same numbers as a serial run.
"""

import numpy as np

DEFAULT_SEED = 20200614


def derive_seed(seed, *keys):
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rng_for(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))
