"""Portable deterministic PRNG (splitmix64).

Every random draw in the toolkit (track noise, watermark pixel selection,
bit permutation, attack noise) flows through this generator so that runs
are byte-reproducible across platforms and languages.  The constants are
splitmix64's published definition.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream seeded with an arbitrary 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform01(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform01() * n)

    def next_u64_array(self, n: int):
        """Vectorized batch of ``n`` outputs; identical to n sequential
        next_u64 calls and advances the stream the same way."""
        import numpy as np

        if n <= 0:
            return np.empty(0, dtype=np.uint64)
        ks = np.arange(1, n + 1, dtype=np.uint64)
        states = np.uint64(self._state) + np.uint64(_GAMMA) * ks   # wraps mod 2^64
        z = states
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        out = z ^ (z >> np.uint64(31))
        self._state = int(states[-1])
        return out

    def uniform01_array(self, n: int):
        import numpy as np

        return (self.next_u64_array(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, sigma: float = 1.0) -> float:
        """Gaussian deviate via Box-Muller (two uniforms per call)."""
        import math

        u1 = self.uniform01()
        u2 = self.uniform01()
        if u1 == 0.0:
            u1 = 2.0**-53
        return sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normal_array(self, n: int, sigma: float = 1.0):
        """Vectorized Box-Muller; matches n sequential normal() calls."""
        import numpy as np

        u = self.uniform01_array(2 * n)
        u1 = np.maximum(u[0::2], 2.0**-53)
        u2 = u[1::2]
        return sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randint(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def permutation(self, n: int) -> "list[int]":
        perm = list(range(n))
        self.shuffle(perm)
        return perm
