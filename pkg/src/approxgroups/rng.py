"""Seeded xorshift64* generator.

The stream is fixed by the seed alone, so instance files and certificates
that record a seed can be regenerated bit for bit on any platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


class XorShift64Star:
    def __init__(self, seed: int):
        # seed 0 is a fixed point of the xorshift step; remap it
        self.state = (int(seed) & _MASK) or 0x9E3779B97F4A7C15
        self.seed = int(seed)

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & _MASK

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, population, k: int) -> list:
        pool = list(population)
        if k > len(pool):
            raise ValueError("sample larger than population")
        return self.shuffle(pool)[len(pool) - k:]
