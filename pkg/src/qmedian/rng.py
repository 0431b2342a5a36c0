"""Deterministic pseudo-random numbers (splitmix64).

Every random quantity in the package comes from this one generator so that
runs are bit-for-bit reproducible across platforms and languages:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state;  z ^= z>>30;  z *= 0xBF58476D1CE4E5B9 (mod 2^64)
    z ^= z>>27;  z *= 0x94D049BB133111EB (mod 2^64);  z ^= z>>31

A uniform double in [0, 1) is the top 53 bits: (z >> 11) * 2^-53.

Independent sub-streams are keyed by index: the stream for item j of a run
seeded with s starts from the splitmix64 output of state (s XOR j).  This
keeps per-sample draws order-independent and safely parallelizable.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


def mix64(state: int) -> int:
    """One splitmix64 output for the given state (state advance + mix)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


class RandomStream:
    """Sequential splitmix64 stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z ^= z >> 30
        z = (z * _MIX1) & _MASK64
        z ^= z >> 27
        z = (z * _MIX2) & _MASK64
        z ^= z >> 31
        return z

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TO_UNIT


def derive_seed(seed: int, salt: int) -> int:
    """Seed for the sub-stream keyed by ``salt`` under master ``seed``."""
    return mix64((seed ^ salt) & _MASK64)


def bulk_uniforms(seed: int, count: int) -> np.ndarray:
    """First uniform of each indexed sub-stream, vectorized.

    Element j equals RandomStream(derive_seed(seed, j)).next_float() exactly;
    the loop is fused into uint64 array arithmetic (which wraps mod 2^64).
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    golden = np.uint64(_GOLDEN)
    m1 = np.uint64(_MIX1)
    m2 = np.uint64(_MIX2)

    def _mix(z: np.ndarray) -> np.ndarray:
        z = z + golden
        z ^= z >> np.uint64(30)
        z *= m1
        z ^= z >> np.uint64(27)
        z *= m2
        z ^= z >> np.uint64(31)
        return z

    states = np.arange(count, dtype=np.uint64)
    states ^= np.uint64(seed & _MASK64)
    z = _mix(_mix(states))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT


# Fixed salts for the package's named sub-streams (arbitrary odd constants).
# Master seeds are always scrambled through one of these before keying
# per-item sub-streams: seed XOR j is a bijection on blocks of indices, so
# two small unscrambled seeds would reuse one another's sub-streams in
# permuted order and permutation-invariant statistics (hit counts) would
# not vary with the seed at all.
SALT_VALUES = 0x56414C5545530101   # synthetic dataset values
SALT_PERM = 0x5045524D5554450B    # synthetic dataset position shuffle
SALT_SIGN = 0x5349474E52554E07    # second estimation run inside sign resolution
SALT_PROBE = 0x50524F4245554E03   # uniform-state probe for out-of-range sign
SALT_SAMPLES = 0x53414D504C450A0D  # measurement draws from the final state
SALT_BASELINE = 0x434C41535349430F  # classical Monte Carlo draws
