"""Seeded, splittable random streams.

Monte Carlo work is cut into fixed-size blocks of trials. Block ``b`` draws
from a stream keyed only by ``(seed, b)``, and each trial occupies a fixed
slot inside its block, so trial ``i`` sees the same variates no matter how
many workers run or in which order blocks finish.
"""
import numpy as np

BLOCK_SIZE = 1 << 15

_BLOCK_DOMAIN = 0
_TRIAL_DOMAIN = 1


def _generator(seed, key):
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def block_rng(seed, block):
    return _generator(seed, (_BLOCK_DOMAIN, int(block)))


def trial_rng(seed, trial):
    """Independent generator for a single trial, for per-realization APIs."""
    return _generator(seed, (_TRIAL_DOMAIN, int(trial)))


def blocks(trials, block_size=BLOCK_SIZE):
    """Yield ``(block_index, count)`` covering ``trials`` trials."""
    trials = int(trials)
    for b, start in enumerate(range(0, trials, block_size)):
        yield b, min(block_size, trials - start)
