"""Seedable counter-based random source used by every randomized operation.

Words come from numpy's Philox generator and are buffered as Python ints,
which keeps per-draw overhead low inside the testers' inner loops.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_BLOCK = 4096


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master: int, index: int) -> int:
    """Per-trial seed: the trial index is XOR-folded into the master seed and
    the result passed through splitmix64, so any trial can be replayed alone."""
    return splitmix64((master & MASK64) ^ splitmix64(index))


class Rng:
    """Buffered Philox stream keyed by an integer seed."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        self._gen = np.random.Philox(self.seed)
        self._buf: list[int] = []
        self._pos = 0

    def spawn(self, index: int) -> "Rng":
        return Rng(trial_seed(self.seed, index))

    def word(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._gen.random_raw(_BLOCK).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def bits(self, k: int) -> int:
        """Uniform integer in [0, 2**k) for 0 <= k <= 64."""
        if k == 0:
            return 0
        return self.word() >> (64 - k)

    def below(self, k: int) -> int:
        """Uniform integer in [0, k), exact via rejection."""
        if k <= 0:
            raise ValueError("below() needs a positive bound")
        if k & (k - 1) == 0:
            return self.bits(k.bit_length() - 1)
        nb = k.bit_length()
        while True:
            r = self.bits(nb)
            if r < k:
                return r

    def random(self) -> float:
        return (self.word() >> 11) * (1.0 / (1 << 53))

    def numpy(self) -> np.random.Generator:
        """An independent numpy Generator derived from this stream."""
        return np.random.Generator(np.random.Philox(self.word()))
