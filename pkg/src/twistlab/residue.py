"""Modular arithmetic substrate: inverses, CRT data, primitive roots, roots of unity."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import NonCoprimeModuli, NotInvertible, NotPrime

# Deterministic for every n < 3.3e24, in particular all of 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact below 2**64)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def mod_inverse(a: int, q: int) -> int:
    """Return b in [0, q) with a*b = 1 (mod q).

    >>> mod_inverse(2, 5)
    3
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q == 1:
        return 0
    if gcd(a, q) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {q}")
    return pow(a, -1, q)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; meant for small n."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def units(q: int) -> np.ndarray:
    """Residues in [0, q) coprime to q (for q = 1 this is [0])."""
    x = np.arange(q, dtype=np.int64)
    return x[np.gcd(x, q) == 1]


def smallest_prime_factors(n: int) -> np.ndarray:
    """Sieve table spf[m] for 0 <= m <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    spf[:2] = 0
    return spf


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return 1
    prime_divisors = list(factorize(p - 1))
    g = 2
    while True:
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in prime_divisors):
            return g
        g += 1


@lru_cache(maxsize=64)
def _log_tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    g = primitive_root(p)
    powers = np.empty(p - 1, dtype=np.int64)
    x = 1
    for t in range(p - 1):
        powers[t] = x
        x = x * g % p
    logs = np.full(p, -1, dtype=np.int64)
    logs[powers] = np.arange(p - 1, dtype=np.int64)
    powers.setflags(write=False)
    logs.setflags(write=False)
    return powers, logs


def power_table(p: int) -> np.ndarray:
    """powers[t] = g**t mod p for the canonical primitive root g, 0 <= t < p-1."""
    return _log_tables(p)[0]


def discrete_log_table(p: int) -> np.ndarray:
    """logs[x] = t with g**t = x (mod p); logs[0] = -1."""
    return _log_tables(p)[1]


@lru_cache(maxsize=64)
def _inverse_table(p: int) -> np.ndarray:
    powers, logs = _log_tables(p)
    inv = np.zeros(p, dtype=np.int64)
    inv[1:] = powers[(-logs[1:]) % (p - 1)]
    inv.setflags(write=False)
    return inv


def inverse_table(p: int) -> np.ndarray:
    """inv[x] = x^-1 mod p for units, inv[0] = 0."""
    if p == 2:
        return np.array([0, 1], dtype=np.int64)
    return _inverse_table(p)


@dataclass(frozen=True)
class FactoredModulus:
    """q = q0*q1 with q0, q1 distinct primes and the CRT inverses."""

    q0: int
    q1: int
    q: int = field(init=False)
    inv_q0_mod_q1: int = field(init=False)
    inv_q1_mod_q0: int = field(init=False)

    def __post_init__(self):
        q0, q1 = int(self.q0), int(self.q1)
        if q0 == q1:
            raise NonCoprimeModuli(f"q0 and q1 must be distinct, both are {q0}")
        for p in (q0, q1):
            if not is_prime(p):
                raise NotPrime(f"{p} is not prime")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q", q0 * q1)
        object.__setattr__(self, "inv_q0_mod_q1", mod_inverse(q0 % q1, q1))
        object.__setattr__(self, "inv_q1_mod_q0", mod_inverse(q1 % q0, q0))

    def split(self, n: int) -> tuple[int, int]:
        return n % self.q0, n % self.q1


def crt_combine(r0: int, r1: int, m: FactoredModulus) -> int:
    """The unique residue mod q0*q1 reducing to r0 mod q0 and r1 mod q1."""
    t0 = (r0 % m.q0) * m.inv_q1_mod_q0 % m.q0
    t1 = (r1 % m.q1) * m.inv_q0_mod_q1 % m.q1
    return (t0 * m.q1 + t1 * m.q0) % m.q


class RootTable:
    """Table of e_q(x) = exp(2 pi i x / q) for 0 <= x < q."""

    __slots__ = ("q", "values")

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("modulus must be positive")
        self.q = int(q)
        vals = np.exp(2j * np.pi * np.arange(q, dtype=np.float64) / q)
        vals.setflags(write=False)
        self.values = vals

    def __call__(self, x) -> complex | np.ndarray:
        return self.values[np.mod(x, self.q)]

    def __len__(self) -> int:
        return self.q


@lru_cache(maxsize=128)
def root_table(q: int) -> RootTable:
    return RootTable(q)


def e_q(x, q: int):
    """Vectorized e(x/q) for integer x, via exact reduction mod q."""
    return root_table(q)(np.asarray(x, dtype=np.int64) if not isinstance(x, int) else x)
