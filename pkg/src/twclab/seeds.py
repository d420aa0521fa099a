"""Counter-based randomness derivation.

All sampling in the package takes an explicit generator. Work unit k of an
experiment with master seed s uses `derive_rng(s, k)`, so results are
bit-for-bit reproducible regardless of execution order or parallelism.
"""

import numpy as np


def derive_rng(seed, *key):
    """Generator for sub-stream `key` (a tuple of nonnegative ints) of `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
