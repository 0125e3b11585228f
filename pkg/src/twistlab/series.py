"""Exact truncated power series with integer coefficients.

Multiplication packs each series into one big integer (Kronecker
substitution at x = 2^b) and lets GMP multiply. Signed coefficients are
handled by a digit offset: every digit of the packed product is shifted
by 2^(b-1), which keeps all digits in [0, 2^b) so decoding never borrows.
"""

from __future__ import annotations

import gmpy2


def _digit_bits(bound: int) -> int:
    # room for |coefficient| <= bound plus the sign offset, byte aligned
    bits = int(bound).bit_length() + 2
    return (bits + 7) // 8 * 8


def _pack(coeffs: list[int], bits: int) -> gmpy2.mpz:
    nbytes = bits // 8
    off = 1 << (bits - 1)
    raw = b"".join((c + off).to_bytes(nbytes, "little") for c in coeffs)
    packed = gmpy2.from_binary(b"\x01\x01" + raw) if raw else gmpy2.mpz(0)
    return packed - _offset(len(coeffs), bits)


def _offset(length: int, bits: int) -> gmpy2.mpz:
    # sum_{i < length} 2^(bits-1) * 2^(bits*i)
    if length == 0:
        return gmpy2.mpz(0)
    base = gmpy2.mpz(1) << bits
    return (gmpy2.mpz(1) << (bits - 1)) * ((base**length - 1) // (base - 1))


def _unpack(value: gmpy2.mpz, length: int, bits: int) -> list[int]:
    # only the low `length` digits are decoded; higher digits never carry down
    nbytes = bits // 8
    shifted = gmpy2.f_mod(value + _offset(length, bits), gmpy2.mpz(1) << (bits * length))
    raw = gmpy2.to_binary(shifted)[2:] if shifted else b""
    raw = raw.ljust(length * nbytes, b"\x00")[: length * nbytes]
    off = 1 << (bits - 1)
    return [int.from_bytes(raw[i : i + nbytes], "little") - off for i in range(0, length * nbytes, nbytes)]


def mul(a: list[int], b: list[int], n: int) -> list[int]:
    """Product of two series truncated to n coefficients (x^0 .. x^(n-1))."""
    same = a is b
    a = [int(x) for x in a[:n]]
    b = a if same else [int(x) for x in b[:n]]
    if not a or not b:
        return [0] * n
    max_a = max(abs(x) for x in a)
    max_b = max_a if same else max(abs(x) for x in b)
    bound = max_a * max_b * min(len(a), len(b))
    bits = _digit_bits(max(bound, max_a, max_b, 1))
    pa = _pack(a, bits)
    prod = pa * pa if same else pa * _pack(b, bits)
    out_len = min(n, len(a) + len(b) - 1)
    coeffs = _unpack(prod, out_len, bits)
    return coeffs + [0] * (n - out_len)


def power(a: list[int], e: int, n: int) -> list[int]:
    """a**e truncated to n coefficients, by binary powering."""
    result = [1] + [0] * (n - 1)
    base = list(a[:n]) + [0] * max(0, n - len(a))
    first = True
    while e:
        if e & 1:
            result = base[:] if first else mul(result, base, n)
            first = False
        e >>= 1
        if e:
            base = mul(base, base, n)
    return result


def mul_naive(a: list[int], b: list[int], n: int) -> list[int]:
    """Schoolbook product; reference path for small n."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def euler_product(n: int) -> list[int]:
    """Coefficients of prod_{m>=1} (1 - x^m) up to x^(n-1).

    Pentagonal number theorem: sum_k (-1)^k x^{k(3k-1)/2}, k over all integers.
    """
    out = [0] * n
    k = 0
    while True:
        hit = False
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e < n:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return out


def divisor_power_sums(r: int, n: int) -> list[int]:
    """sigma_r(m) for 0 <= m < n (index 0 set to 0)."""
    s = [0] * n
    for d in range(1, n):
        p = d**r
        for mult in range(d, n, d):
            s[mult] += p
    return s


def eisenstein(weight: int, n: int) -> list[int]:
    """q-expansion of E_4 or E_6 (constant term 1), n coefficients."""
    const = {4: 240, 6: -504}[weight]
    sig = divisor_power_sums(weight - 1, n)
    return [1] + [const * s for s in sig[1:]]
