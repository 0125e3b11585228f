"""Trace functions of prime and composite moduli and their Fourier transforms.

A trace function here is any q-periodic complex table. Values are stored as
complex128 arrays of length q and are frozen after construction.

Normalizations:
    Kl_d(n; p) = p^{-(d-1)/2} * sum_{x_1...x_d = n} e((x_1 + ... + x_d)/p)
    FT(K)(n)   = q^{-1/2} * sum_x K(x) e(nx/q)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd

import numpy as np

from .errors import DegreeZero, ModulusMismatch, NonCoprimeModuli, NotPrime
from .reduction import tree_sum
from .residue import (
    FactoredModulus,
    discrete_log_table,
    e_q,
    is_prime,
    mod_inverse,
    power_table,
)

# q above this uses the chirp transform; at or below, the direct O(q^2) sum.
FAST_FT_THRESHOLD = 2048
# p - 1 above this uses FFT cyclic convolution in the hyper-Kloosterman recursion.
FAST_CONV_THRESHOLD = 128
_DIRECT_BLOCK = 256


@dataclass(frozen=True, eq=False)
class TraceFunction:
    """A q-periodic complex function stored as a table of its q values."""

    modulus: int
    values: np.ndarray = field(repr=False)
    label: str = ""
    supnorm_hint: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True).reshape(-1)
        if len(vals) != self.modulus:
            raise ValueError(f"expected {self.modulus} values, got {len(vals)}")
        if self.supnorm_hint is not None:
            if self.supnorm_hint < 0:
                raise ValueError("supnorm_hint must be nonnegative")
            top = float(np.max(np.abs(vals))) if len(vals) else 0.0
            if top > self.supnorm_hint + 1e-9:
                raise ValueError(f"|values| reaches {top}, above supnorm_hint {self.supnorm_hint}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, n):
        return self.values[np.mod(n, self.modulus)]

    def __len__(self):
        return self.modulus

    @cached_property
    def supnorm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @cached_property
    def fourier_supnorm(self) -> float:
        """max_n |FT(K)(n)|, computed on first access."""
        return fourier_transform(self).supnorm

    def scaled(self, c: complex, label: str | None = None) -> "TraceFunction":
        return TraceFunction(self.modulus, self.values * c, label or f"{c}*{self.label}")


def constant(q: int, c: complex = 1.0) -> TraceFunction:
    return TraceFunction(q, np.full(q, c, dtype=np.complex128), f"const({c})", abs(c))


def indicator(q: int, x0: int = 0) -> TraceFunction:
    vals = np.zeros(q, dtype=np.complex128)
    vals[x0 % q] = 1.0
    return TraceFunction(q, vals, f"delta_{x0 % q}", 1.0)


def additive_char(a: int, q: int) -> TraceFunction:
    """x -> e(ax/q)."""
    x = np.arange(q, dtype=np.int64)
    return TraceFunction(q, e_q((a % q) * x, q), f"e({a}x/{q})", 1.0)


def dirichlet_char(q: int, j: int) -> TraceFunction:
    """The character with chi(g^t) = e(jt/(q-1)) for the smallest primitive root g."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    logs = discrete_log_table(q)
    vals = np.zeros(q, dtype=np.complex128)
    vals[1:] = e_q((j % (q - 1)) * logs[1:], q - 1)
    return TraceFunction(q, vals, f"chi_{j} mod {q}", 1.0)


def _cyclic_convolve_direct(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    m = len(f)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return f[idx] @ g


def _cyclic_convolve_fft(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(f) * np.fft.fft(g))


def cyclic_convolve(f: np.ndarray, g: np.ndarray, method: str = "auto") -> np.ndarray:
    """(f*g)[a] = sum_b f[a-b] g[b] over Z/mZ."""
    if method == "auto":
        method = "fft" if len(f) > FAST_CONV_THRESHOLD else "direct"
    if method == "direct":
        return _cyclic_convolve_direct(f, g)
    if method == "fft":
        return _cyclic_convolve_fft(f, g)
    raise ValueError(f"unknown convolution method {method!r}")


def _kloosterman_tables(d: int, p: int, method: str) -> np.ndarray:
    """Rows Kl_1..Kl_d (mod p) as an array of shape (d, p)."""
    powers = power_table(p)
    logs = discrete_log_table(p)
    add = e_q(powers, p)  # e(g^b/p) in log coordinates
    scale = p ** -0.5
    out = np.empty((d, p), dtype=np.complex128)
    out[0] = e_q(np.arange(p, dtype=np.int64), p)
    cur_log = out[0][powers]  # Kl_1 on units, indexed by discrete log
    cur_zero = 1.0 + 0j
    for level in range(1, d):
        cur_log = scale * cyclic_convolve(cur_log, add, method)
        # units sum of e(y/p) is -1
        cur_zero = -scale * cur_zero
        row = np.empty(p, dtype=np.complex128)
        row[0] = cur_zero
        row[1:] = cur_log[logs[1:]]
        out[level] = row
    return out


@lru_cache(maxsize=32)
def _kloosterman_cached(d: int, p: int, method: str) -> np.ndarray:
    tab = _kloosterman_tables(d, p, method)
    tab.setflags(write=False)
    return tab


def hyper_kloosterman(d: int, p: int, method: str = "auto") -> TraceFunction:
    """Tabulate Kl_d(n; p) for all n mod p by the multiplicative recursion.

    Kl_{d+1}(n) = p^{-1/2} sum_{y unit} Kl_d(n/y) e(y/p), Kl_1(n) = e(n/p).
    Each step is a cyclic convolution of length p-1 in discrete-log
    coordinates. At n = 0 the recursion gives (-1)^(d-1) p^{-(d-1)/2};
    that value is what the table stores.
    """
    if d == 0:
        raise DegreeZero("hyper-Kloosterman degree must be >= 1")
    if d < 0:
        raise ValueError("degree must be positive")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    row = _kloosterman_cached(d, p, method)[d - 1]
    return TraceFunction(p, row, f"Kl_{d} mod {p}", float(d))


def kloosterman_zero_value(d: int, p: int) -> float:
    """The stored convention Kl_d(0; p) = (-1)^(d-1) p^{-(d-1)/2}."""
    return (-1) ** (d - 1) * p ** (-(d - 1) / 2)


def hyper_kloosterman_composite(d: int, m: FactoredModulus) -> TraceFunction:
    """Kl_d(n; q0 q1) = Kl_d(q1bar^d n; q0) * Kl_d(q0bar^d n; q1)."""
    k0 = hyper_kloosterman(d, m.q0)
    k1 = hyper_kloosterman(d, m.q1)
    n = np.arange(m.q, dtype=np.int64)
    t0 = pow(m.inv_q1_mod_q0, d, m.q0)
    t1 = pow(m.inv_q0_mod_q1, d, m.q1)
    vals = k0.values[(t0 * n) % m.q0] * k1.values[(t1 * n) % m.q1]
    return TraceFunction(m.q, vals, f"Kl_{d} mod {m.q}", float(d) ** 2)


@lru_cache(maxsize=256)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    xs = [x for x in range(c) if gcd(x, c) == 1]
    inv = [pow(x, -1, c) if c > 1 else 0 for x in xs]
    a = np.array(xs, dtype=np.int64)
    b = np.array(inv, dtype=np.int64)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def units_with_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """(units mod c, their inverses); c = 1 gives ([0], [0])."""
    return _units_and_inverses(int(c))


def classical_kloosterman(a: int, b: int, c: int) -> complex:
    """S(a, b; c) = sum over units x mod c of e((ax + b xbar)/c), unnormalized."""
    if c < 1:
        raise ValueError("modulus c must be >= 1")
    xs, inv = units_with_inverses(c)
    phase = ((a % c) * xs + (b % c) * inv) % c
    return complex(tree_sum(e_q(phase, c)))


def _ft_direct(values: np.ndarray) -> np.ndarray:
    q = len(values)
    roots = e_q(np.arange(q, dtype=np.int64), q)
    x = np.arange(q, dtype=np.int64)
    out = np.empty(q, dtype=np.complex128)
    for start in range(0, q, _DIRECT_BLOCK):
        n = np.arange(start, min(q, start + _DIRECT_BLOCK), dtype=np.int64)
        out[n] = roots[np.outer(n, x) % q] @ values
    return out / np.sqrt(q)


def _chirp(q: int, t: np.ndarray) -> np.ndarray:
    # exp(pi i t^2 / q) with t^2 reduced mod 2q in exact integer arithmetic
    r = (t.astype(object) ** 2 % (2 * q)).astype(np.int64) if q > 2**31 else (t * t) % (2 * q)
    return np.exp(1j * np.pi * r.astype(np.float64) / q)


def _ft_chirp(values: np.ndarray) -> np.ndarray:
    """Length-q transform for arbitrary q via the chirp (Bluestein) identity
    nx = (n^2 + x^2 - (n-x)^2)/2 and one power-of-two convolution."""
    q = len(values)
    t = np.arange(q, dtype=np.int64)
    w = _chirp(q, t)
    size = 1 << int(2 * q - 1).bit_length()
    a = np.zeros(size, dtype=np.complex128)
    a[:q] = values * w
    b = np.zeros(size, dtype=np.complex128)
    cw = np.conj(w)
    b[:q] = cw
    if q > 1:
        b[size - q + 1 :] = cw[1:][::-1]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:q]
    return w * conv / np.sqrt(q)


def fourier_transform(K: TraceFunction, method: str = "auto") -> TraceFunction:
    """Normalized transform FT(K)(n) = q^{-1/2} sum_x K(x) e(nx/q)."""
    q = K.modulus
    if method == "auto":
        method = "fast" if q > FAST_FT_THRESHOLD else "direct"
    if method == "direct":
        vals = _ft_direct(K.values)
    elif method == "fast":
        vals = _ft_chirp(K.values)
    else:
        raise ValueError(f"unknown transform method {method!r}")
    return TraceFunction(q, vals, f"FT({K.label})")


def crt_product(K0: TraceFunction, K1: TraceFunction) -> TraceFunction:
    """K(n) = K0(n mod q0) K1(n mod q1) on Z/(q0 q1)."""
    q0, q1 = K0.modulus, K1.modulus
    if gcd(q0, q1) != 1:
        raise NonCoprimeModuli(f"moduli {q0} and {q1} are not coprime")
    n = np.arange(q0 * q1, dtype=np.int64)
    hint = None
    if K0.supnorm_hint is not None and K1.supnorm_hint is not None:
        hint = K0.supnorm_hint * K1.supnorm_hint
    return TraceFunction(q0 * q1, K0.values[n % q0] * K1.values[n % q1], f"{K0.label}*{K1.label}", hint)


def verify_twisted_multiplicativity(K0: TraceFunction, K1: TraceFunction, m: FactoredModulus) -> float:
    """max_b |FT(K0 K1)(b) - FT(K0)(q1bar b) FT(K1)(q0bar b)|."""
    if K0.modulus != m.q0 or K1.modulus != m.q1:
        raise ModulusMismatch("K0, K1 moduli must equal q0, q1")
    lhs = fourier_transform(crt_product(K0, K1)).values
    h0 = fourier_transform(K0).values
    h1 = fourier_transform(K1).values
    b = np.arange(m.q, dtype=np.int64)
    rhs = h0[(m.inv_q1_mod_q0 * b) % m.q0] * h1[(m.inv_q0_mod_q1 * b) % m.q1]
    return float(np.max(np.abs(lhs - rhs)))


def kloosterman_recursion_mod(d: int, q: int) -> np.ndarray:
    """Kl_d(n; q) for any modulus q by the recursion over units mod q, O(d q phi(q)).

    Independent of the prime-modulus tables and of the CRT factorization;
    used as a cross-check for composite moduli.
    """
    if d < 1:
        raise DegreeZero("degree must be >= 1")
    n = np.arange(q, dtype=np.int64)
    cur = e_q(n, q)
    ys, yinv = units_with_inverses(q)
    add = e_q(ys, q)
    for _ in range(d - 1):
        idx = (n[:, None] * yinv[None, :]) % q
        cur = (cur[idx] @ add) / np.sqrt(q)
    return cur


def family(spec: str, q: int) -> TraceFunction:
    """Build a trace function from a short family string.

    Forms: ``kl:D`` (hyper-Kloosterman), ``chi:J`` (Dirichlet character),
    ``add:A`` (additive character), ``delta`` / ``delta:X``, ``one``, ``zero``.
    """
    name, _, arg = spec.strip().partition(":")
    name = name.lower()
    if name == "kl":
        return hyper_kloosterman(int(arg or 2), q)
    if name == "chi":
        return dirichlet_char(q, int(arg or 1))
    if name == "add":
        return additive_char(int(arg or 1) % q, q)
    if name == "delta":
        return indicator(q, int(arg or 0))
    if name == "one":
        return constant(q, 1.0)
    if name == "zero":
        return TraceFunction(q, np.zeros(q), "zero", 0.0)
    raise ValueError(f"unknown trace-function family {spec!r}")
