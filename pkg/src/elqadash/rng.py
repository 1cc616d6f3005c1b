"""Deterministic pseudo-random number generation.

The package pins a single, named generator so every stream a seed produces can
be reproduced exactly, in any language: **xorshift64*** (Marsaglia xorshift
with the 2685821657736338717 finalizer multiply). The raw seed goes through
one splitmix64 scramble to build the initial state, which keeps seed 0 usable
(xorshift state must never be zero).

Floats are drawn from the top 53 bits of the output word, so ``random()``
yields the usual dyadic rationals in [0, 1).
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_XORSHIFT_MULT = 0x2545F4914F6CDD1D
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class Xorshift64Star:
    """xorshift64* stream seeded from a 64-bit integer."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be a non-negative integer")
        state = _splitmix64(seed & _MASK64)
        self.state = state if state != 0 else _SPLITMIX_GAMMA

    def next_u64(self) -> int:
        s = self.state
        s ^= (s >> 12)
        s = (s ^ (s << 25)) & _MASK64
        s ^= (s >> 27)
        self.state = s
        return (s * _XORSHIFT_MULT) & _MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / 9007199254740992.0

    def uniform(self, a: float, b: float) -> float:
        """Uniform float in [a, b)."""
        return a + (b - a) * self.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), bias-free via rejection sampling."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        bound = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < bound:
                return u % n

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), by partial Fisher-Yates; draw order."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        out = []
        for i in range(k):
            j = i + self.randrange(n - i)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]


def round_half_up(x: float) -> int:
    """Round to nearest integer, ties away from zero toward +inf (documented
    convention for all count-from-rate computations)."""
    import math

    return int(math.floor(x + 0.5))
