"""Seeded 64-bit PRNG: xorshift64* with splitmix64 seeding.

Constants, so other implementations can regenerate the same instances:

* seeding: state = splitmix64(seed), where splitmix64 adds 0x9E3779B97F4A7C15
  and mixes with multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB
  (shifts 30, 27, 31); a zero result is replaced by 0x9E3779B97F4A7C15;
* step: x ^= x >> 12; x ^= x << 25; x ^= x >> 27; output x * 0x2545F4914F6CDD1D.

Probabilities are compared exactly: ``bernoulli(p)`` is ``u64 < p * 2**64``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import MutableSequence, Sequence

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
OUT_MULT = 0x2545F4914F6CDD1D


def splitmix64(seed: int) -> int:
    z = (seed + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def threshold(p) -> int:
    """Integer t with ``u < p * 2**64  <=>  u < t`` for every integer u."""
    return math.ceil(Fraction(p) * (1 << 64))


class XorShift64Star:
    def __init__(self, seed: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = splitmix64(seed) or GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * OUT_MULT) & MASK64

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def randint(self, a: int, b: int) -> int:
        return a + self.randbelow(b - a + 1)

    def bernoulli(self, p) -> bool:
        return self.next_u64() < threshold(p)

    def bernoulli_many(self, p, count: int) -> list[bool]:
        """``count`` draws of ``bernoulli(p)``, same stream, threshold computed once."""
        thr = threshold(p)
        return [self.next_u64() < thr for _ in range(count)]

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def shuffle(self, xs: MutableSequence) -> None:
        for i in range(len(xs) - 1, 0, -1):
            j = self.randbelow(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def choice(self, xs: Sequence):
        return xs[self.randbelow(len(xs))]
