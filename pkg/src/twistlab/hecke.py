"""Exact Hecke eigenform coefficients, symmetric-square GL3 coefficients,
divisor functions and the Rankin-Selberg convolution.

Level-1 cusp forms of weight k in {12, 16, 18, 20, 22, 26} span a
one-dimensional space, so the normalized eigenform is Delta * E_{k-12}.
Integer coefficients are exact (Python ints); normalized values
lambda(n) = a(n) / n^{(k-1)/2} are float64.

GL3 coefficients are those of sym^2 f. At a prime p with
lambda_f(p) = alpha + 1/alpha,

    A(p^a, p^b) = s_{(a+b, b, 0)}(alpha^2, 1, alpha^{-2})
                = h_{a+b} h_b - h_{a+b+1} h_{b-1}            (Jacobi-Trudi)

where h_j are complete homogeneous symmetric polynomials in the three
Satake parameters. Since their product is 1, e1 = e2 = lambda_f(p)^2 - 1
and e3 = 1, so h_j follows a real three-term recursion and no complex
alpha is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, isqrt

import numpy as np

from . import series
from .errors import HeckeRelationError, InsufficientSource, OutOfRange, UnsupportedWeight
from .residue import factorize, smallest_prime_factors

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

# Eisenstein factors E_{k-12} expressed through E_4 and E_6.
_EISENSTEIN_FACTORS = {12: (), 16: (4,), 18: (6,), 20: (4, 4), 22: (4, 6), 26: (4, 4, 6)}


@dataclass(frozen=True, eq=False)
class GL2CoefficientTable:
    """a(n) and lambda(n) for 1 <= n <= N; index 0 of both is a zero placeholder."""

    weight: int
    ints: list = field(repr=False)
    lam: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ints = [0] + [int(x) for x in self.ints[1:]]
        object.__setattr__(self, "ints", ints)
        n = np.arange(len(ints), dtype=np.float64)
        num = np.array([float(x) for x in ints], dtype=np.float64)
        lam = np.zeros(len(ints), dtype=np.float64)
        lam[1:] = num[1:] / n[1:] ** ((self.weight - 1) / 2)
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def N(self) -> int:
        return len(self.ints) - 1

    def a(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise OutOfRange(f"index {n} outside 1..{self.N}")
        return self.ints[n]

    def check_hecke_relations(self) -> None:
        """Verify a(1) = 1, the prime-power recursion and multiplicativity, exactly."""
        verify_hecke_relations(self.ints, self.weight)


def verify_hecke_relations(ints: list, weight: int) -> None:
    N = len(ints) - 1
    if N >= 1 and ints[1] != 1:
        raise HeckeRelationError(f"a(1) = {ints[1]}, expected 1")
    if N < 2:
        return
    spf = smallest_prime_factors(N)
    chi = 1  # p^{k-1} computed per prime below
    for p in range(2, N + 1):
        if spf[p] != p:
            continue
        chi = p ** (weight - 1)
        prev, cur, pj = 1, ints[p], p
        while pj * p <= N:
            nxt = ints[p] * cur - chi * prev
            if ints[pj * p] != nxt:
                raise HeckeRelationError(f"a({pj * p}) fails the prime-power recursion at p={p}")
            prev, cur, pj = cur, nxt, pj * p
    # a(n) = prod over p^e || n of a(p^e) is equivalent to coprime multiplicativity
    for n in range(2, N + 1):
        p = int(spf[n])
        pe = p
        m = n // p
        while m % p == 0:
            m //= p
            pe *= p
        if m > 1 and ints[n] != ints[pe] * ints[m]:
            raise HeckeRelationError(f"a({n}) != a({pe}) a({m})")


def _cusp_series(weight: int, N: int) -> list[int]:
    """Coefficients of Delta*E_{k-12} / x, i.e. a(1..N) as a 0-based list."""
    base = series.power(series.euler_product(N), 24, N)
    for w in _EISENSTEIN_FACTORS[weight]:
        base = series.mul(base, series.eisenstein(w, N), N)
    return base


def delta_coefficients(N: int, *, verify: bool = True) -> GL2CoefficientTable:
    """Ramanujan tau(n) for n <= N from Delta = x * prod (1 - x^n)^24."""
    return eigenform_coefficients(12, N, verify=verify)


def eigenform_coefficients(k: int, N: int, *, verify: bool = True) -> GL2CoefficientTable:
    """Normalized level-1 eigenform of weight k (one-dimensional weights only)."""
    if k not in SUPPORTED_WEIGHTS:
        raise UnsupportedWeight(f"weight {k} not in {SUPPORTED_WEIGHTS}")
    if N < 1:
        raise ValueError("N must be >= 1")
    ints = [0] + _cusp_series(k, N)
    if verify:
        verify_hecke_relations(ints, k)
    return GL2CoefficientTable(k, ints)


def complete_homogeneous(t: float, top: int) -> np.ndarray:
    """h_0..h_top for Satake parameters (alpha^2, 1, alpha^-2) with e1 = e2 = t, e3 = 1."""
    h = np.zeros(top + 1, dtype=np.float64)
    h[0] = 1.0
    for j in range(1, top + 1):
        h[j] = t * h[j - 1] - (t * h[j - 2] if j >= 2 else 0.0) + (h[j - 3] if j >= 3 else 0.0)
    return h


def sym2_prime_power(lam_p: float, a: int, b: int) -> float:
    """A(p^a, p^b) from lambda_f(p) via Jacobi-Trudi."""
    h = complete_homogeneous(lam_p * lam_p - 1.0, a + b + 1)
    return float(h[a + b] * h[b] - (h[a + b + 1] * h[b - 1] if b >= 1 else 0.0))


@dataclass(frozen=True, eq=False)
class GL3CoefficientTable:
    """A(m, r) for m r^2 <= N. rows[r][m] holds A(m, r); rows[r][0] is a placeholder."""

    source: GL2CoefficientTable = field(repr=False)
    N: int
    rows: dict = field(repr=False)

    def A(self, m: int, r: int) -> float:
        if m < 1 or r < 1 or m * r * r > self.N:
            raise OutOfRange(f"A({m},{r}) outside m r^2 <= {self.N}")
        return float(self.rows[r][m])

    @property
    def r_max(self) -> int:
        return isqrt(self.N)


def _prime_power_tables(lam: np.ndarray, N: int, spf: np.ndarray) -> dict[int, np.ndarray]:
    tables = {}
    for p in np.nonzero(spf[2:] == np.arange(2, N + 1))[0] + 2:
        p = int(p)
        amax = 0
        pp = p
        while pp <= N:
            amax += 1
            pp *= p
        bmax = 0
        pp = p * p
        while pp <= N:
            bmax += 1
            pp *= p * p
        h = complete_homogeneous(lam[p] * lam[p] - 1.0, amax + bmax + 1)
        tab = np.empty((amax + 1, bmax + 1), dtype=np.float64)
        for a in range(amax + 1):
            for b in range(bmax + 1):
                tab[a, b] = h[a + b] * h[b] - (h[a + b + 1] * h[b - 1] if b >= 1 else 0.0)
        tables[p] = tab
    return tables


def sym_square_coefficients(src: GL2CoefficientTable, N: int) -> GL3CoefficientTable:
    """Coefficients A(m, r) of sym^2 f for all m r^2 <= N."""
    if src.N < N:
        raise InsufficientSource(f"source table has length {src.N} < {N}")
    spf = smallest_prime_factors(N)
    pp = _prime_power_tables(src.lam, N, spf)

    # A(m, 1) by multiplicativity along the smallest-prime-factor chain
    row1 = np.zeros(N + 1, dtype=np.float64)
    if N >= 1:
        row1[1] = 1.0
    for m in range(2, N + 1):
        p = int(spf[m])
        a, rest = 1, m // p
        while rest % p == 0:
            rest //= p
            a += 1
        row1[m] = row1[rest] * pp[p][a, 0]
    rows = {1: row1}

    for r in range(2, isqrt(N) + 1):
        top = N // (r * r)
        m = np.arange(top + 1, dtype=np.int64)
        rest = m.copy()
        factor = np.ones(top + 1, dtype=np.float64)
        for p, b in factorize(r).items():
            a = np.zeros(top + 1, dtype=np.int64)
            div = (rest % p == 0) & (rest > 0)
            while div.any():
                rest[div] //= p
                a[div] += 1
                div = (rest % p == 0) & (rest > 0)
            factor *= pp[p][a, b]
        row = np.zeros(top + 1, dtype=np.float64)
        row[1:] = row1[rest[1:]] * factor[1:]
        rows[r] = row
    for row in rows.values():
        row.setflags(write=False)
    return GL3CoefficientTable(src, N, rows)


def divisor_function(j: int, n: int) -> int:
    """d_j(n): number of ordered j-tuples of positive integers with product n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if j < 1:
        raise ValueError("j must be >= 1")
    out = 1
    for _, a in factorize(n).items():
        out *= comb(a + j - 1, j - 1)
    return out


def rankin_selberg_coefficient(g3: GL3CoefficientTable, g2: GL2CoefficientTable, n: int) -> float:
    """lambda_pi(n) = sum over n = m r^2 of A(m, r) lambda_f(m)."""
    if n < 1 or n > g3.N or n > g2.N:
        raise OutOfRange(f"n = {n} outside the table range")
    total = 0.0
    r = 1
    while r * r <= n:
        if n % (r * r) == 0:
            m = n // (r * r)
            total += g3.rows[r][m] * g2.lam[m]
        r += 1
    return total


def rankin_selberg_coefficients(g3: GL3CoefficientTable, g2: GL2CoefficientTable, N: int | None = None) -> np.ndarray:
    """lambda_pi(n) for 0 <= n <= N (index 0 is 0)."""
    N = min(g3.N, g2.N) if N is None else N
    if N > g3.N or N > g2.N:
        raise OutOfRange(f"N = {N} outside the table range")
    out = np.zeros(N + 1, dtype=np.float64)
    for r in range(1, isqrt(N) + 1):
        top = N // (r * r)
        m = np.arange(1, top + 1)
        out[m * r * r] += g3.rows[r][1 : top + 1] * g2.lam[1 : top + 1]
    return out
