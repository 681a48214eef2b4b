"""Portable seeded random numbers.

Every random decision in the toolkit (splits, bootstraps, feature sampling,
network initialisation, batch order, synthesis) draws from SplitMix64 so that
results can be reproduced bit-for-bit by any implementation of the same
generator. The i-th output of a stream seeded with ``s`` is
``mix64(s + i * GAMMA)`` (mod 2**64), which lets blocks of outputs be computed
with vectorised uint64 arithmetic.

Component seeds are derived from a master seed by hashing the component name
with 64-bit FNV-1a and mixing: ``derive_seed(m, name) = mix64(m ^ fnv1a(name))``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """SplitMix64 output finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & MASK64
    return h


def derive_seed(master: int, component: str) -> int:
    """Seed for a named component, stable across runs and platforms."""
    return mix64((master & MASK64) ^ fnv1a64(component.encode("utf-8")))


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """SplitMix64 stream with scalar and block draws."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def u64_block(self, n: int) -> np.ndarray:
        if n <= 0:
            return np.zeros(0, dtype=np.uint64)
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.state) + steps * np.uint64(GAMMA)
            out = _mix_array(states)
        self.state = (self.state + n * GAMMA) & MASK64
        return out

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def random_block(self, n: int) -> np.ndarray:
        return (self.u64_block(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound

    def below_block(self, bound: int, n: int) -> np.ndarray:
        """``n`` unbiased integers in [0, bound); rejected slots are redrawn after the block."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        raw = self.u64_block(n)
        out = np.empty(n, dtype=np.int64)
        if limit == 1 << 64:
            return (raw % np.uint64(bound)).astype(np.int64)
        ok = raw < np.uint64(limit)
        out[ok] = (raw[ok] % np.uint64(bound)).astype(np.int64)
        for i in np.flatnonzero(~ok):
            out[i] = self.below(bound)
        return out

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of range(n), swapping from the end."""
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """First ``k`` entries of a partial Fisher-Yates shuffle, sorted ascending."""
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.array(sorted(pool[:k]), dtype=np.int64)
