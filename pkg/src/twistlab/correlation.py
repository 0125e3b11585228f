"""Complete exponential sums built from trace functions of prime modulus q0:
Moebius-twisted correlation sums, L-sums, the Z(v) transform and its shifted
autocorrelation, and the M / FT sums over the auxiliary moduli.

Conventions: ``sign`` is +1 or -1 and stands for the upper / lower choice
in "+-"; a "-+" in a formula is then -sign. Sums marked * run over units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from .errors import DivisibilityViolated, InvalidParams, ModulusMismatch, NotInvertible
from .reduction import tree_sum
from .residue import e_q, is_prime, mod_inverse
from .trace import (
    TraceFunction,
    classical_kloosterman,
    fourier_transform,
    hyper_kloosterman,
    units_with_inverses,
)


class _Infinity:
    """The point at infinity of P^1(F_q)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


@dataclass(frozen=True)
class CorrelationResult:
    value: complex
    skipped: int = 0
    metadata: dict = field(default_factory=dict)

    def __abs__(self):
        return abs(self.value)

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class MoebiusMatrix:
    """[[a, b], [c, d]] over Z/q0 with unit determinant."""

    a: int
    b: int
    c: int
    d: int
    q0: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.q0)
        if gcd(self.det, self.q0) != 1:
            raise NotInvertible(f"determinant {self.det} is not a unit mod {self.q0}")

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.q0

    def __matmul__(self, other: "MoebiusMatrix") -> "MoebiusMatrix":
        if other.q0 != self.q0:
            raise ModulusMismatch("matrices live over different moduli")
        return MoebiusMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.q0,
        )

    def adjugate(self) -> "MoebiusMatrix":
        return MoebiusMatrix(self.d, -self.b, -self.c, self.a, self.q0)

    def inverse(self) -> "MoebiusMatrix":
        t = mod_inverse(self.det, self.q0)
        adj = self.adjugate()
        return MoebiusMatrix(adj.a * t, adj.b * t, adj.c * t, adj.d * t, self.q0)

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def act_array(self, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(values, finite mask) of gamma . alpha for finite residues alpha."""
        q = self.q0
        alpha = np.asarray(alpha, dtype=np.int64) % q
        num = (self.a * alpha + self.b) % q
        den = (self.c * alpha + self.d) % q
        finite = den != 0
        out = np.zeros_like(alpha)
        if finite.any():
            inv = np.array([pow(int(x), -1, q) for x in den[finite]], dtype=np.int64)
            out[finite] = num[finite] * inv % q
        return out, finite


def moebius_act(gamma: MoebiusMatrix, alpha, q0: int | None = None):
    """gamma . alpha = (a alpha + b) / (c alpha + d) on P^1(F_q0)."""
    q = gamma.q0 if q0 is None else q0
    if q != gamma.q0:
        raise ModulusMismatch("q0 does not match the matrix modulus")
    if alpha is INFINITY:
        return INFINITY if gamma.c == 0 else gamma.a * mod_inverse(gamma.c, q) % q
    den = (gamma.c * alpha + gamma.d) % q
    if den == 0:
        return INFINITY
    return (gamma.a * alpha + gamma.b) * mod_inverse(den, q) % q


def is_scalar_pair(g1: MoebiusMatrix, g2: MoebiusMatrix, q0: int | None = None) -> bool:
    """Whether g2 g1^{-1} is scalar; tested on g2 adj(g1), which differs by a unit."""
    if q0 is not None and (q0 != g1.q0 or q0 != g2.q0):
        raise ModulusMismatch("q0 does not match the matrix moduli")
    return (g2 @ g1.adjugate()).is_scalar()


def matrix_correlation(khat0: TraceFunction, gamma: MoebiusMatrix, q0: int | None = None) -> CorrelationResult:
    """q0^{-1/2} sum* over alpha with gamma.alpha finite of Khat0(alpha) conj Khat0(gamma.alpha)."""
    q = khat0.modulus
    if gamma.q0 != q or (q0 is not None and q0 != q):
        raise ModulusMismatch("Khat0 and gamma must share the modulus q0")
    alpha, _ = units_with_inverses(q)
    img, finite = gamma.act_array(alpha)
    terms = khat0(alpha[finite]) * np.conj(khat0(img[finite]))
    skipped = int(np.count_nonzero(~finite))
    return CorrelationResult(complex(tree_sum(terms)) / np.sqrt(q), skipped)


@dataclass(frozen=True)
class CorrelationParams:
    r1: int
    r2: int
    p1: int
    p2: int
    n: int
    q1: int
    sign: int = 1

    def validate(self, q0: int) -> None:
        if self.sign not in (1, -1):
            raise InvalidParams("sign must be +1 or -1")
        for name in ("p1", "p2", "q1", "r1", "r2"):
            if gcd(getattr(self, name), q0) != 1:
                raise InvalidParams(f"{name} = {getattr(self, name)} is not a unit mod {q0}")


def correlation_matrices(params: CorrelationParams, q0: int) -> tuple[MoebiusMatrix, MoebiusMatrix]:
    """gamma1 = [[-q1, r1], [0, p1 q1]] and
    gamma2 = [[-+n r2 - p1 q1, p2 r2], [-+n p2 q1, p2^2 q1]]."""
    p = params
    mn = -p.sign * p.n
    g1 = MoebiusMatrix(-p.q1, p.r1, 0, p.p1 * p.q1, q0)
    g2 = MoebiusMatrix(mn * p.r2 - p.p1 * p.q1, p.p2 * p.r2, mn * p.p2 * p.q1, p.p2 * p.p2 * p.q1, q0)
    return g1, g2


def correlation_sum(khat0: TraceFunction, params: CorrelationParams, q0: int | None = None) -> CorrelationResult:
    """q0^{-1/2} sum*_alpha Khat0((q1bar r1 - alpha) p1bar)
    conj Khat0((q1bar r2 - inv(alphabar p2 -+ n) p1) p2bar).

    Values of alpha with alphabar p2 -+ n = 0 are skipped and counted.
    """
    q = khat0.modulus
    if q0 is not None and q0 != q:
        raise ModulusMismatch("Khat0 modulus differs from q0")
    params.validate(q)
    p = params
    q1b = mod_inverse(p.q1, q)
    p1b = mod_inverse(p.p1, q)
    p2b = mod_inverse(p.p2, q)
    alpha, alpha_inv = units_with_inverses(q)
    inner = (alpha_inv * p.p2 - p.sign * p.n) % q
    ok = inner != 0
    inv_inner = np.array([pow(int(x), -1, q) for x in inner[ok]], dtype=np.int64)
    a = alpha[ok]
    left = khat0(((q1b * p.r1 - a) % q) * p1b)
    right = khat0(((q1b * p.r2 - inv_inner * p.p1) % q) * p2b)
    value = complex(tree_sum(left * np.conj(right))) / np.sqrt(q)
    return CorrelationResult(value, int(np.count_nonzero(~ok)))


def l_sum(khat: TraceFunction, alpha: int, beta: int, u: int) -> complex:
    """L_{alpha,beta}(u; q) = q^{-1/2} sum over b with (b + beta u, q) = 1 of Khat(b) e(alpha inv(b + beta u) / q)."""
    q = khat.modulus
    t, tinv = units_with_inverses(q)
    b = (t - beta * u) % q
    terms = khat(b) * e_q((alpha % q) * tinv % q, q)
    return complex(tree_sum(terms)) / np.sqrt(q)


def l_sum_table(khat: TraceFunction, alpha: int, beta: int) -> np.ndarray:
    """L_{alpha,beta}(u; q) for all u mod q."""
    q = khat.modulus
    t, tinv = units_with_inverses(q)
    phase = e_q((alpha % q) * tinv % q, q)
    u = np.arange(q, dtype=np.int64)
    b = (t[None, :] - beta * u[:, None]) % q
    return (khat.values[b] @ phase) / np.sqrt(q)


def _kl2(q0: int) -> TraceFunction:
    return hyper_kloosterman(2, q0)


def z_transform(K0: TraceFunction, alpha: int, beta: int, gamma: int, *, include_zero: bool = False) -> np.ndarray:
    """Z(v) = q0^{-1/2} sum_x Kl_2(beta gamma x) K0(x v) Kl_2(alpha x v) for all v mod q0.

    By default x runs over units. With include_zero the x = 0 term, which
    uses the stored value Kl_2(0; q0) = -q0^{-1/2}, is added.
    """
    q = K0.modulus
    for name, val in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if gcd(val, q) != 1:
            raise InvalidParams(f"{name} = {val} must be a unit mod {q}")
    kl = _kl2(q)
    x = np.arange(0 if include_zero else 1, q, dtype=np.int64)
    v = np.arange(q, dtype=np.int64)
    xv = (x[:, None] * v[None, :]) % q
    w = kl((beta * gamma * x) % q)
    body = K0.values[xv] * kl.values[(alpha * xv) % q]
    return (w @ body) / np.sqrt(q)


def zz_correlation(Z: np.ndarray, Zp: np.ndarray, delta: int) -> complex:
    """sum_v Z(v) conj Z'(v - delta)."""
    Z = np.asarray(Z)
    Zp = np.asarray(Zp)
    if Z.shape != Zp.shape:
        raise ModulusMismatch(f"tables of lengths {len(Z)} and {len(Zp)}")
    q = len(Z)
    v = np.arange(q, dtype=np.int64)
    return complex(tree_sum(Z * np.conj(Zp[(v - delta) % q])))


def char_error_sum(K0: TraceFunction, r: int, n: int, q0: int, q1: int, sign: int = 1) -> tuple[complex, complex]:
    """Two evaluations of the same complete sum:

    x-route:     q0^{-1/2} sum_x K0(x) e(r q1bar x / q0) Kl_2(+-n x; q0)
    alpha-route: q0^{-1/2} sum*_alpha Khat0(r q1bar - alpha) e(-+ alphabar n / q0)
    """
    if K0.modulus != q0:
        raise ModulusMismatch("K0 modulus differs from q0")
    q1b = mod_inverse(q1, q0)
    kl = _kl2(q0)
    x = np.arange(q0, dtype=np.int64)
    xs = K0.values * e_q((r * q1b % q0) * x % q0, q0) * kl((sign * n * x) % q0)
    x_route = complex(tree_sum(xs)) / np.sqrt(q0)
    khat = fourier_transform(K0)
    a, ainv = units_with_inverses(q0)
    al = khat((r * q1b - a) % q0) * e_q((-sign * n % q0) * ainv % q0, q0)
    a_route = complex(tree_sum(al)) / np.sqrt(q0)
    return x_route, a_route


# ---------------------------------------------------------------- k-modulus sums


def m_sum(m: int, n: int, r: int, c: int, n1: int, q0: int, q1: int, sign: int = 1) -> complex:
    """M_{n1,r}(m, n; rc) = sum*_{u mod c} e(+- inv(u q1^2) q0bar m / c) S(q0bar r ubar, +- q0bar n; rc/n1)."""
    if (r * c) % n1:
        raise DivisibilityViolated(f"n1 = {n1} does not divide rc = {r * c}")
    if gcd(c, q0 * q1) != 1:
        raise InvalidParams(f"c = {c} must be coprime to q0 q1")
    mod = r * c // n1
    if gcd(q0, mod) != 1:
        raise InvalidParams(f"q0 = {q0} must be coprime to rc/n1 = {mod}")
    q0b_c = mod_inverse(q0, c)
    q0b_m = mod_inverse(q0, mod)
    us, uinv = units_with_inverses(c)
    q1sq_inv = mod_inverse(q1 * q1, c)
    total = 0j
    for u, ub in zip(us.tolist(), uinv.tolist()):
        ph = e_q(sign * ub * q1sq_inv * q0b_c * m % c, c) if c > 1 else 1.0
        total += ph * classical_kloosterman(q0b_m * r * ub, sign * q0b_m * n, mod)
    return complex(total)


@dataclass(frozen=True)
class FTKResult:
    value: complex
    k: int
    rhs_zero: float
    rhs_nonzero: float
    holds: bool
    constant: float = 1.0

    @property
    def ratio(self) -> float:
        """|FT| over the applicable right-hand side at implicit constant 1."""
        rhs = self.rhs_zero if self.n_is_zero else self.rhs_nonzero
        return abs(self.value) / rhs if rhs > 0 else (0.0 if self.value == 0 else float("inf"))

    n_is_zero: bool = False


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def ft_k_bound_zero(k: int, r: int, c1: int, c2: int, m: int, mp: int) -> float:
    """sqrt(k) r c1 c2 sum over d, d' | c1 c2 with (d, d') | m - m' of (d, d')."""
    ds = _divisors(c1 * c2)
    s = sum(gcd(d, e) for d in ds for e in ds if (m - mp) % gcd(d, e) == 0)
    return float(np.sqrt(k) * r * c1 * c2 * s)


def ft_k_bound_nonzero(k: int, r: int, c1: int, c2: int, c2p: int, n1: int, n: int, m: int, mp: int,
                      q1: int, sign: int) -> float:
    """sqrt(k) sum_{d1 | c1} d1 sum_{d1' | c1} d1' #{x1 unit mod rc1/n1 : q1^2 n1 x1 = -+m (d1)}
    sum_{d2 | (c2, q1^2 n1 c2' + n m)} sum_{d2' | (c2', q1^2 n1 c2 + n m')} d2 d2'."""
    mod = r * c1 // n1
    xs, _ = units_with_inverses(mod)
    d2sum = sum(_divisors(gcd(c2, q1 * q1 * n1 * c2p + n * m)))
    d2psum = sum(_divisors(gcd(c2p, q1 * q1 * n1 * c2 + n * mp)))
    c1divs = _divisors(c1)
    total = 0
    for d1 in c1divs:
        count = int(np.count_nonzero((q1 * q1 * n1 * xs + sign * m) % d1 == 0))
        total += d1 * count * sum(c1divs)
    return float(np.sqrt(k) * total * d2sum * d2psum)


def ft_k_sum(m: int, mp: int, n: int, r: int, c1: int, c2: int, c2p: int, n1: int, q0: int, q1: int,
             sign: int = 1, *, constant: float = 1.0) -> FTKResult:
    """FT(n; k) = k^{-1/2} sum_{v mod k} M(m, v; r c1 c2) conj M(m', v; r c1 c2') e(n v q0bar / k),
    k = r c1 c2 c2' / n1.

    Both divisor-sum bounds are returned without constant; ``holds``
    compares |FT| with ``constant`` times the form that applies to n.
    """
    if (r * c1) % n1:
        raise DivisibilityViolated(f"n1 = {n1} does not divide r c1 = {r * c1}")
    k = r * c1 * c2 * c2p // n1
    if gcd(q0, k) != 1:
        raise InvalidParams(f"q0 = {q0} must be coprime to k = {k}")
    c, cp = c1 * c2, c1 * c2p
    per, perp = r * c // n1, r * cp // n1
    # M(m, v; rc) depends on v only mod rc/n1, which divides k
    Mv = np.array([m_sum(m, v, r, c, n1, q0, q1, sign) for v in range(per)])
    Mpv = np.array([m_sum(mp, v, r, cp, n1, q0, q1, sign) for v in range(perp)])
    v = np.arange(k, dtype=np.int64)
    q0b = mod_inverse(q0, k)
    terms = Mv[v % per] * np.conj(Mpv[v % perp]) * e_q((n * q0b % k) * v % k, k)
    value = complex(tree_sum(terms)) / np.sqrt(k)
    rz = ft_k_bound_zero(k, r, c1, c2, m, mp)
    rn = ft_k_bound_nonzero(k, r, c1, c2, c2p, n1, n, m, mp, q1, sign)
    holds = abs(value) <= constant * (rz if n == 0 else rn) * (1 + 1e-9) + 1e-9
    return FTKResult(value, k, rz, rn, holds, constant, n == 0)


# ---------------------------------------------------------------- q0-sum


@dataclass(frozen=True)
class FTQ0Result:
    route_a: complex
    route_b: complex
    metadata: dict = field(default_factory=dict)

    @property
    def rel_diff(self) -> float:
        """|A - B| / max(|A|, |B|, 1); the unit floor keeps exact zeros from reading as mismatches."""
        return abs(self.route_a - self.route_b) / max(abs(self.route_a), abs(self.route_b), 1.0)


def ft_q0_sum(K0: TraceFunction, K1: TraceFunction, m: int, mp: int, c: int, cp: int, r: int, n1: int,
              delta: int, sign: int = 1) -> FTQ0Result:
    """FT(n) two ways, with delta = kbar n supplied directly.

    Route A, the defining triple sum over units u, u' and v mod q0:
        q0^{-1/2} sum L(u q1; q) conj L'(u' q1; q)
                  sum_v Kl_2(g v ubar) conj Kl_2(g' v u'bar) e(delta v / q0)
    with L = L_{+- cbar^2 rbar^2 m, 1}( . ; q) built on Khat for K = K0 K1
    and g = +- cbar^3 rbar^3 n1^2.

    Route B, the factored form
        L1 conj L1' sqrt(q0) sum_v Z(v) conj Z'(v - delta)
    with L1 = L_{alpha q0bar^2, 1}(0; q1) and Z built on K0 with
    (alpha q1bar^2, 1, g). Z includes the x = 0 term here; that term is
    what makes the two routes agree exactly rather than up to O(q0^{-1/2}).
    """
    q0, q1 = K0.modulus, K1.modulus
    if q0 == q1 or not is_prime(q0) or not is_prime(q1):
        raise InvalidParams("K0, K1 need distinct prime moduli")
    if sign not in (1, -1):
        raise InvalidParams("sign must be +1 or -1")
    q = q0 * q1
    for name, val in (("c", c), ("c'", cp), ("r", r), ("n1", n1)):
        if gcd(val, q) != 1:
            raise InvalidParams(f"{name} = {val} must be coprime to q0 q1")
    inv = lambda x, mod: mod_inverse(x % mod, mod)  # noqa: E731

    aL = sign * inv(c, q) ** 2 * inv(r, q) ** 2 * m % q
    aLp = sign * inv(cp, q) ** 2 * inv(r, q) ** 2 * mp % q
    g = sign * inv(c, q0) ** 3 * inv(r, q0) ** 3 * n1 * n1 % q0
    gp = sign * inv(cp, q0) ** 3 * inv(r, q0) ** 3 * n1 * n1 % q0
    if aL % q0 == 0 or aLp % q0 == 0:
        raise InvalidParams("m and m' must be units mod q0")

    # route A
    from .trace import crt_product

    khat = fourier_transform(crt_product(K0, K1))
    us, uinv = units_with_inverses(q0)
    La = l_sum_table(khat, aL, 1)[(us * q1) % q]
    Lpa = l_sum_table(khat, aLp, 1)[(us * q1) % q]
    kl = _kl2(q0)
    v = np.arange(q0, dtype=np.int64)
    A = kl((g * np.outer(uinv, v)) % q0)
    Ap = kl((gp * np.outer(uinv, v)) % q0)
    ev = e_q((delta % q0) * v % q0, q0)
    route_a = complex(np.einsum("u,w,uv,wv,v->", La, np.conj(Lpa), A, np.conj(Ap), ev)) / np.sqrt(q0)

    # route B
    khat1 = fourier_transform(K1)
    L1 = l_sum(khat1, aL * inv(q0, q1) ** 2, 1, 0)
    L1p = l_sum(khat1, aLp * inv(q0, q1) ** 2, 1, 0)
    alpha = aL * inv(q1, q0) ** 2 % q0
    alphap = aLp * inv(q1, q0) ** 2 % q0
    Z = z_transform(K0, alpha, 1, g, include_zero=True)
    Zp = z_transform(K0, alphap, 1, gp, include_zero=True)
    route_b = L1 * np.conj(L1p) * np.sqrt(q0) * zz_correlation(Z, Zp, delta)
    meta = {"alpha": alpha, "alpha'": alphap, "gamma": g, "gamma'": gp, "delta": delta % q0,
            "z_includes_x0": True}
    return FTQ0Result(route_a, complex(route_b), meta)
