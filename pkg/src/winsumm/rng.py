"""Deterministic random generation for dataset construction.

Anything that lands in an output file must be reproducible across platforms
and Python versions, so draws never come from the stdlib `random` module.
The generator is a plain 64-bit linear congruential generator with Knuth's
MMIX constants:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

Bounded draws use rejection sampling on the raw 64-bit output, so every
value in [lo, hi] is exactly equally likely.

Per-transcript sub-seeds are `seed XOR fnv1a64(transcript_id)`, which makes
parallel and serial exports produce identical bytes.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211


class Lcg64:
    """64-bit LCG; the only random source used by the pipeline."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (_MUL * self._state + _INC) & _MASK64
        return self._state

    def randint(self, lo: int, hi: int) -> int:
        """Uniform draw from the inclusive range [lo, hi]."""
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = ((1 << 64) // span) * span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + (x % span)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(seed: int, transcript_id: str) -> int:
    return (seed ^ fnv1a64(transcript_id.encode("utf-8"))) & _MASK64
