"""A small 64-bit generator with fully written-out constants, so that any
implementation can reproduce the same draws from the same seed.

Seeding (splitmix64, one step):

    z = seed + 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    state = z ^ (z >> 31)          (replaced by 1 if it comes out 0)

Step (xorshift64*):

    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    state = x
    output = x * 0x2545F4914F6CDD1D

All arithmetic is modulo 2^64. Bounded integers use rejection on the top
of the 64-bit range so every residue is equally likely.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_M1 = 0xBF58476D1CE4E5B9
SPLITMIX_M2 = 0x94D049BB133111EB
XORSHIFT_MULT = 0x2545F4914F6CDD1D


def splitmix64(seed: int) -> int:
    z = (seed + SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_M2) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* seeded through one splitmix64 step."""

    def __init__(self, seed: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = splitmix64(seed) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * XORSHIFT_MULT) & MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("upper bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]
