"""Seedable PRNG used for every stochastic operation in the package.

The generator is xoshiro256++ (4x64-bit state, 64-bit output), seeded by
expanding a single 64-bit seed through splitmix64. All sampling in the package
draws from explicitly seeded instances so results are bit-reproducible across
runs and reimplementable in other languages from this file alone.

Stream discipline
-----------------
* One generator instance per operation, constructed from an explicit seed.
* Multi-stream operations (one stream per image, per phantom, ...) derive child
  seeds with :func:`derive_seed`, never by sharing a generator.
* ``gaussian_pair`` consumes exactly two uniforms per call (Box-Muller); batch
  helpers document how many draws they consume.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64_scramble(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Child seed for sub-stream ``stream`` (0-based) of master seed ``seed``."""
    if stream < 0:
        raise ValueError("stream index must be non-negative")
    return _splitmix64_scramble((seed + (stream + 1) * _GOLDEN) & _MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256PP:
    """xoshiro256++ with splitmix64 seed expansion."""

    def __init__(self, seed: int):
        state = seed & _MASK64
        words = []
        for _ in range(4):
            state = (state + _GOLDEN) & _MASK64
            words.append(_splitmix64_scramble(state))
        self._s = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision (top bits)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by top-bits rejection (unbiased)."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = (n - 1).bit_length()
        if bits == 0:
            return 0
        while True:
            v = self.next_u64() >> (64 - bits)
            if v < n:
                return v

    def gaussian_pair(self) -> tuple[float, float]:
        """Two independent N(0, 1) draws via Box-Muller (two uniforms consumed)."""
        u1 = self.random()
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        theta = 2.0 * math.pi * u2
        return r * math.cos(theta), r * math.sin(theta)

    def gaussians(self, count: int) -> list[float]:
        """``count`` N(0, 1) draws; ceil(count/2) pairs, odd tail discarded."""
        out = []
        while len(out) < count:
            z0, z1 = self.gaussian_pair()
            out.append(z0)
            if len(out) < count:
                out.append(z1)
        return out

    def partial_shuffle(self, items: list, take: int) -> list:
        """First ``take`` entries of a Fisher-Yates shuffle of ``items`` (in place)."""
        n = len(items)
        if take > n:
            raise ValueError("take exceeds population size")
        for i in range(take):
            j = i + self.randbelow(n - i)
            items[i], items[j] = items[j], items[i]
        return items[:take]
