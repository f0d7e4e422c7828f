"""Deterministic 64-bit RNG primitives shared by the perturbation and
reference-embedding code.

Everything here is pure integer arithmetic mod 2^64 so that streams are
bit-exact across platforms and across the scalar / numpy-vectorized paths.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: int) -> int:
    """First output of a splitmix64 stream seeded at ``x``.

    Canonical sequence: state advances by the golden gamma, then the
    result is finalized with the Stafford mix. ``splitmix64(0)`` is the
    published value 0xE220A8397B1DCDAF.
    """
    z = (int(x) + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def splitmix64_np(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`splitmix64` over a uint64 array."""
    z = (np.asarray(x, dtype=np.uint64) + np.uint64(GOLDEN_GAMMA))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Stateful splitmix64 stream.

    ``next_u64`` yields the canonical sequence for the seed; helpers map
    outputs onto the unit interval (53-bit) and small integer ranges.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_signed_unit(self) -> float:
        """Uniform float in [-1, 1): 53-bit uniform mapped by x -> 2x - 1."""
        return (self.next_u64() >> 11) * 2.0**-52 - 1.0

    def next_below(self, bound: int) -> int:
        """Integer in [0, bound) via modulo reduction."""
        return self.next_u64() % bound


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash, used to fingerprint query ids into stream seeds."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & MASK64
    return h
