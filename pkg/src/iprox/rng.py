"""Seedable 64-bit generator for stochastic block selection.

The generator is pinned in-repo rather than delegated to numpy so that
stochastic solver traces replay bit-for-bit on any platform and stay
stable across library upgrades.  SplitMix64: the state walks by a fixed
odd constant and each output is a finalizer-mixed copy of the state.
"""

from __future__ import annotations

from .errors import ContractViolation

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic uniform generator over 64-bit integers."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        if not isinstance(seed, int) or not (0 <= seed <= _MASK64):
            raise ContractViolation("seed must be an integer in [0, 2^64)")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def randint_below(self, n: int) -> int:
        """Uniform integer in [0, n), free of modulo bias.

        Rejection sampling: draws are discarded while they fall in the
        short tail ``[limit, 2^64)`` with ``limit = 2^64 - (2^64 mod n)``,
        then reduced mod n.  For n far below 2^64 the expected number of
        redraws is negligible.
        """
        if not isinstance(n, int) or n <= 0:
            raise ContractViolation("n must be a positive integer")
        if n > _MASK64:
            raise ContractViolation("n must fit in 64 bits")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n
