"""Deterministic random generator used by every randomized operation.

All randomness in the package flows from a single 64-bit seed through
splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer).  The compiled
and pure-Python solver kernels implement the identical update, so a run is
reproducible bit-for-bit across backends and platforms.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance one splitmix64 step; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Stateful wrapper over splitmix64 with rejection-sampled bounded draws."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) with exact rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        rem = (1 << 64) % n
        if rem == 0:
            return self.next_u64() % n
        limit = (1 << 64) - rem
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53
