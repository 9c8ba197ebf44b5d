"""Deterministic random streams shared by every sampling backend.

One 64-bit master seed fans out into one independent stream per
``(trial, purpose)`` pair, so trial t draws the same numbers no matter
which backend runs it or in what order trials execute.  The generator is
splitmix64, chosen because it is small enough to restate verbatim inside
the compiled kernel; both implementations must stay bit-identical.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer, bijective on 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MULT_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MULT_B) & _MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, trial: int, stream: int = 0) -> int:
    """Initial generator state for one (trial, stream) pair.

    Distinct pairs land on distinct odd multiples of the golden-ratio
    increment before mixing, so streams never overlap.
    """
    if trial < 0 or stream < 0:
        raise ValueError("trial and stream indices must be non-negative")
    return mix64((master_seed + _GOLDEN * (2 * trial + stream + 1)) & _MASK64)


class SplitMix64:
    """Minimal uniform generator: 64-bit state, doubles on [0, 1)."""

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def random(self) -> float:
        # top 53 bits, same construction the kernel uses
        return (self.next_uint64() >> 11) * 2.0**-53


def trial_stream(master_seed: int, trial: int, stream: int = 0) -> SplitMix64:
    """Generator positioned at the start of one (trial, stream) pair."""
    return SplitMix64(stream_seed(master_seed, trial, stream))
