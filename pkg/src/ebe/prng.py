"""Seeded splitmix64 generator for reproducible randomized checks.

The algorithm is the standard splitmix64 finisher: state advances by the
constant 0x9E3779B97F4A7C15 and each output is mixed through two xor-shift
multiplies.  Outputs are identical across platforms for a given seed, which
keeps randomized reports byte-stable.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        # 53 mantissa bits, exactly representable in [0, 1).
        u = self.next_u64() >> 11
        return low + (high - low) * (u * (1.0 / (1 << 53)))

    def uniforms(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        return np.array([self.uniform(low, high) for _ in range(n)])

    def complexes(self, n: int, scale: float = 1.0) -> np.ndarray:
        re = self.uniforms(n, -scale, scale)
        im = self.uniforms(n, -scale, scale)
        return re + 1j * im
