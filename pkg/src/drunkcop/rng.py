"""Counter-based per-trial random streams.

Trial ``i`` of a run seeded with ``master_seed`` draws its k-th uniform as a
SplitMix64 hash of ``(trial_key(master_seed, i), k)``. Because every draw is
a pure function of (seed, trial, counter), a trial gives the same numbers
whether it is replayed alone, run in another worker, or advanced in lockstep
with thousands of other trials inside a numpy batch.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def trial_key(master_seed: int, trial: int) -> int:
    return _mix((_mix(master_seed & _MASK) + (trial + 1) * _GOLDEN) & _MASK)


class TrialStream:
    """Scalar view of one trial's stream; ``random()`` returns a float in [0, 1)."""

    __slots__ = ("key", "counter")

    def __init__(self, master_seed: int, trial: int):
        self.key = trial_key(master_seed, trial)
        self.counter = 0

    def random(self) -> float:
        self.counter += 1
        return (_mix((self.key + self.counter * _GOLDEN) & _MASK) >> 11) * _INV53


def trial_keys(master_seed: int, trials: np.ndarray) -> np.ndarray:
    return np.array([trial_key(master_seed, int(t)) for t in trials], dtype=np.uint64)


def batch_uniforms(keys: np.ndarray, counter: int) -> np.ndarray:
    """The ``counter``-th draw (1-based) of every stream in ``keys``."""
    with np.errstate(over="ignore"):
        z = keys + np.uint64((counter * _GOLDEN) & _MASK)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53
