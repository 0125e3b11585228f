"""Twisted coefficient sums, progression sums and their dual forms, and the
numerical Poisson / Voronoi identity checks.

Every long sum is formed as an explicit term array and reduced with
``tree_sum`` so the value does not depend on the thread count.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from .errors import (
    CoefficientRangeExceeded,
    NonPrimitiveClass,
    QuadratureFailure,
    TruncationNotConverged,
)
from .hecke import GL2CoefficientTable, GL3CoefficientTable
from .quadrature import integrate
from .reduction import tree_sum
from .residue import FactoredModulus, e_q, is_prime, mod_inverse
from .trace import TraceFunction, hyper_kloosterman, hyper_kloosterman_composite
from .window import SmoothWindow


@dataclass(frozen=True)
class SumResult:
    """A sum value plus bookkeeping about how it was formed."""

    value: complex
    metadata: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)

    def __abs__(self):
        return abs(self.value)


def _lam(coeffs) -> np.ndarray:
    if isinstance(coeffs, GL2CoefficientTable):
        return coeffs.lam
    arr = np.asarray(coeffs)
    if arr.ndim != 1:
        raise ValueError("coefficient sequence must be one-dimensional")
    return arr


def window_range(X: float, lo: float = 1.0, hi: float = 2.0) -> tuple[int, int]:
    """Integers n with lo*X <= n < hi*X, as a half-open (start, stop) pair."""
    if X <= 0:
        return 1, 1
    start = max(1, math.ceil(lo * X))
    stop = max(start, math.ceil(hi * X))
    return start, stop


def _require(lam: np.ndarray, last: int) -> None:
    if last >= len(lam):
        raise CoefficientRangeExceeded(f"need coefficients up to n = {last}, table stops at {len(lam) - 1}")


def twisted_sum(coeffs, K: TraceFunction, V: SmoothWindow, X: float, *, threads: int = 1) -> complex:
    """sum over X <= n < 2X of lambda(n) K(n) V(n/X)."""
    start, stop = window_range(X)
    if stop <= start:
        return 0j
    lam = _lam(coeffs)
    _require(lam, stop - 1)
    n = np.arange(start, stop, dtype=np.int64)
    terms = lam[start:stop] * K(n) * V(n / X)
    return complex(tree_sum(terms.astype(np.complex128), threads=threads))


def rs_twisted_sum(g3: GL3CoefficientTable, g2: GL2CoefficientTable, K: TraceFunction, V: SmoothWindow,
                   X: float, *, r_max: int | None = None, threads: int = 1) -> SumResult:
    """Double sum of A(n, r) lambda_f(n) K(n r^2) V(n r^2 / X) over n, r >= 1.

    The symmetric sum over r != 0 equals twice the returned value, since the
    summand is even in r; both are reported in the metadata.
    """
    start, stop = window_range(X)
    meta = {"r_convention": "r>=1", "full_sum_factor": 2}
    if stop <= start:
        meta["full_sum"] = 0j
        return SumResult(0j, meta)
    if stop - 1 > g3.N or stop - 1 > g2.N:
        raise CoefficientRangeExceeded(f"need tables up to {stop - 1}, have GL3 {g3.N} / GL2 {g2.N}")
    top = math.isqrt(stop - 1)
    if r_max is not None:
        top = min(top, r_max)
    chunks = []
    for r in range(1, top + 1):
        lo = -(-start // (r * r))
        hi = (stop - 1) // (r * r)
        if hi < lo:
            continue
        n = np.arange(lo, hi + 1, dtype=np.int64)
        m = n * r * r
        chunks.append(g3.rows[r][lo : hi + 1] * g2.lam[lo : hi + 1] * K(m) * V(m / X))
    terms = np.concatenate(chunks).astype(np.complex128) if chunks else np.zeros(0, np.complex128)
    value = complex(tree_sum(terms, threads=threads))
    meta["full_sum"] = 2 * value
    meta["r_max"] = top
    return SumResult(value, meta)


def ap_sum(coeffs, a: int, q: int, V: SmoothWindow, X: float, *, allow_imprimitive: bool = False,
           threads: int = 1) -> complex:
    """sum over n = a (mod q), X <= n < 2X, of lambda(n) V(n/X)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if not allow_imprimitive and math.gcd(a, q) != 1:
        raise NonPrimitiveClass(f"gcd({a}, {q}) != 1")
    start, stop = window_range(X)
    first = start + ((a - start) % q)
    if first >= stop:
        return 0j
    lam = _lam(coeffs)
    n = np.arange(first, stop, q, dtype=np.int64)
    _require(lam, int(n[-1]))
    terms = lam[n] * V(n / X)
    return complex(tree_sum(terms.astype(np.complex128), threads=threads))


def dual_ap_sum(coeffs, a: int, q, d: int, W, X: float, *, n_max: int | None = None,
                threads: int = 1) -> complex:
    """(X / q^((d+1)/2)) sum_n conj(lambda(n)) Kl_d(a n; q) W(n X / q^d).

    W is any decaying window standing in for the archimedean transform; the
    result is meant for magnitude studies only. For a SmoothWindow the range
    of n is read off its support, otherwise n_max must be given.
    """
    if isinstance(q, FactoredModulus):
        Kl = hyper_kloosterman_composite(d, q)
        qq = q.q
    else:
        qq = int(q)
        if not is_prime(qq):
            raise ValueError("a plain integer modulus must be prime; pass a FactoredModulus otherwise")
        Kl = hyper_kloosterman(d, qq)
    if math.gcd(a, qq) != 1:
        raise NonPrimitiveClass(f"gcd({a}, {qq}) != 1")
    scale = X / qq**d
    if n_max is None:
        if not isinstance(W, SmoothWindow):
            raise ValueError("n_max is required for a window without known support")
        start, stop = window_range(1.0 / scale)
    else:
        start, stop = 1, n_max + 1
    if stop <= start:
        return 0j
    lam = _lam(coeffs)
    _require(lam, stop - 1)
    n = np.arange(start, stop, dtype=np.int64)
    terms = np.conj(lam[start:stop]) * Kl((a * n) % qq) * W(n * scale)
    return complex(X / qq ** ((d + 1) / 2) * tree_sum(terms.astype(np.complex128), threads=threads))


def _ramanujan_prime(p: int, h: int) -> int:
    return p - 1 if h % p == 0 else -1


def trivial_delta(n: int, r: int, p: int, q0: int) -> float:
    """(p q0)^{-1} sum over c | p q0 of the Ramanujan sum c_c(n - r).

    Ramanujan sums are multiplicative in c, so the four divisors give
    1 + c_p(h) + c_q0(h) + c_p(h) c_q0(h) = (1 + c_p(h)) (1 + c_q0(h)),
    an integer; the result is exactly 1 when p q0 | n - r and 0 otherwise.
    """
    if p == q0:
        raise ValueError("p and q0 must be distinct primes")
    h = n - r
    total = (1 + _ramanujan_prime(p, h)) * (1 + _ramanujan_prime(q0, h))
    return total / (p * q0)


def poisson_check(K: TraceFunction, V: SmoothWindow, X: float, M: int | None = None, *,
                  tail_tol: float = 1e-9) -> tuple[complex, complex, float]:
    """Compare sum_n K(n) V(n/X) with its Poisson dual

        (X/M) sum_r (sum_{beta mod M} K(beta) e(r beta / M)) Vhat(r X / M).

    The dual sum runs over |r| <= R = 40 M max(Z, 1) / X. The shell
    R < |r| <= 2R + 1 is evaluated as the tail estimate; if it exceeds
    tail_tol a QuadratureFailure is raised.
    """
    M = K.modulus if M is None else M
    if M % K.modulus:
        raise ValueError(f"M = {M} is not a multiple of the period {K.modulus}")
    if not np.any(K.values):
        return 0j, 0j, 0.0
    start, stop = window_range(X)
    n = np.arange(start, stop, dtype=np.int64)
    lhs = complex(tree_sum((K(n) * V(n / X)).astype(np.complex128))) if stop > start else 0j

    beta = np.arange(M, dtype=np.int64)
    kb = K(beta)
    R = int(40 * M * max(V.Z, 1.0) / X)

    def dual(rs):
        khat = np.array([np.sum(kb * e_q((r * beta) % M, M)) for r in rs])
        vh = V.fourier(np.asarray(rs, dtype=np.float64) * X / M)
        return X / M * khat * vh

    core = np.arange(-R, R + 1)
    rhs = complex(tree_sum(dual(core)))
    shell = np.array([r for r in range(-(2 * R + 1), 2 * R + 2) if abs(r) > R])
    tail = float(np.sum(np.abs(dual(shell))))
    if tail > tail_tol:
        raise QuadratureFailure(f"Poisson dual tail {tail:.3e} exceeds {tail_tol:.1e}")
    return lhs, rhs, abs(lhs - rhs)


def voronoi_kernel(W: SmoothWindow, k: int, y, *, tol: float = 1e-14) -> np.ndarray:
    """Wtilde(y) = 2 pi i^k integral W(x) J_{k-1}(4 pi sqrt(x y)) dx, vectorized over y."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    lo, hi = W.support
    # initial panels follow the oscillation count of the Bessel factor
    cycles = 2.0 * (np.sqrt(hi * float(np.max(y))) - np.sqrt(lo * float(np.max(y)))) if y.size else 0.0
    res = integrate(
        lambda x: W(x)[:, None] * bessel.jn(k - 1, 4 * np.pi * np.sqrt(np.outer(x, y))),
        lo, hi, tol=tol, initial_panels=int(cycles) + 4, max_panels=20000,
    )
    return 2 * np.pi * (1j**k) * res.value


@lru_cache(maxsize=32)
def _kernel_peak(W: SmoothWindow, k: int) -> float:
    # |Wtilde| is concentrated near y ~ 1; a log grid over [1e-3, 100] brackets its maximum
    y = np.geomspace(1e-3, 100.0, 400)
    return float(np.max(np.abs(voronoi_kernel(W, k, y))))


def voronoi_check(f: GL2CoefficientTable, a: int, c: int, W: SmoothWindow, X: float, *,
                  rel_cut: float = 1e-12, block: int = 32, max_terms: int | None = None) -> tuple[complex, complex, float]:
    """Compare sum lambda(n) e(an/c) W(n/X) with its Voronoi dual

        (X/c) sum_n lambda(n) e(-abar n / c) Wtilde(n X / c^2).

    The dual sum is taken in blocks of `block` terms and stops after the
    first block whose largest |Wtilde| is below rel_cut times the peak of
    |Wtilde| over y > 0.
    """
    if math.gcd(a, c) != 1:
        raise NonPrimitiveClass(f"gcd({a}, {c}) != 1")
    if W.amplitude == 0:
        return 0j, 0j, 0.0
    k = f.weight
    start, stop = window_range(X)
    _require(f.lam, stop - 1)
    n = np.arange(start, stop, dtype=np.int64)
    lhs = complex(tree_sum((f.lam[start:stop] * e_q((a * n) % c, c) * W(n / X)).astype(np.complex128)))

    abar = mod_inverse(a, c)
    limit = f.N if max_terms is None else min(f.N, max_terms)
    parts = []
    peak = _kernel_peak(W, k)
    lo = 1
    while True:
        if lo > limit:
            raise TruncationNotConverged(
                f"dual kernel still above {rel_cut:.0e} x peak at n = {lo - 1}; coefficient table ends at {f.N}"
            )
        hi = min(lo + block, limit + 1)
        m = np.arange(lo, hi, dtype=np.int64)
        kern = voronoi_kernel(W, k, m * X / c**2)
        parts.append(f.lam[lo:hi] * e_q((-abar * m) % c, c) * kern)
        top = float(np.max(np.abs(kern)))
        lo = hi
        if top < rel_cut * peak:
            break
    rhs = X / c * complex(tree_sum(np.concatenate(parts)))
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, rel
