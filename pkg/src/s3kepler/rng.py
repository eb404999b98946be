"""Portable seeded sampling.

SplitMix64, so other implementations can reproduce point sets bit for bit.
All arithmetic is modulo 2**64::

    state <- state + 0x9E3779B97F4A7C15
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB
    z <- z ^ (z >> 31)

A double in [0, 1) is ``(z >> 11) * 2**-53`` and a uniform draw on [a, b) is
``a + (b - a) * u``. The initial state is the seed itself.
"""

from __future__ import annotations

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()
