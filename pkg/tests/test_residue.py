import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistlab.errors import NonCoprimeModuli, NotInvertible, NotPrime
from twistlab.residue import (
    FactoredModulus,
    crt_combine,
    discrete_log_table,
    e_q,
    euler_phi,
    factorize,
    inverse_table,
    is_prime,
    mod_inverse,
    power_table,
    primitive_root,
    root_table,
    smallest_prime_factors,
)


def trial_division_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def test_is_prime_matches_trial_division():
    assert [n for n in range(3000) if is_prime(n)] == [n for n in range(3000) if trial_division_prime(n)]


def test_is_prime_large_values():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)
    # strong pseudoprime to several small bases
    assert not is_prime(3215031751)
    assert is_prime(18446744073709551557)  # largest prime below 2^64


@pytest.mark.parametrize("a,q,expected", [(1, 7, 1), (2, 5, 3)])
def test_mod_inverse_examples(a, q, expected):
    assert mod_inverse(a, q) == expected


def test_mod_inverse_not_invertible():
    with pytest.raises(NotInvertible):
        mod_inverse(2, 4)


def test_mod_inverse_random():
    rng = random.Random(11)
    for _ in range(1000):
        q = rng.randint(2, 10**6)
        a = rng.randrange(q)
        if math.gcd(a, q) != 1:
            continue
        assert a * mod_inverse(a, q) % q == 1


@pytest.mark.parametrize("r0,r1,expected", [(0, 0, 0), (2, 3, 8), (1, 1, 1)])
def test_crt_examples(r0, r1, expected):
    assert crt_combine(r0, r1, FactoredModulus(3, 5)) == expected


def test_crt_is_bijection():
    m = FactoredModulus(3, 5)
    images = {crt_combine(a, b, m) for a in range(3) for b in range(5)}
    assert images == set(range(15))
    for a in range(3):
        for b in range(5):
            assert m.split(crt_combine(a, b, m)) == (a, b)


def test_factored_modulus_invariants():
    m = FactoredModulus(2063, 47)
    assert m.q == 2063 * 47
    assert m.q1 * m.inv_q1_mod_q0 % m.q0 == 1
    assert m.q0 * m.inv_q0_mod_q1 % m.q1 == 1
    with pytest.raises(NotPrime):
        FactoredModulus(15, 7)
    with pytest.raises(NonCoprimeModuli):
        FactoredModulus(7, 7)


@pytest.mark.parametrize("p,g", [(2, 1), (5, 2), (7, 3), (23, 5), (41, 6)])
def test_primitive_root_smallest(p, g):
    assert primitive_root(p) == g


def test_primitive_root_order_exhaustive():
    for p in [q for q in range(3, 400) if trial_division_prime(q)]:
        g = primitive_root(p)
        seen = {pow(g, t, p) for t in range(p - 1)}
        assert len(seen) == p - 1
        # no smaller generator
        for h in range(2, g):
            assert len({pow(h, t, p) for t in range(p - 1)}) < p - 1


def test_log_tables_are_inverse():
    p = 101
    powers, logs = power_table(p), discrete_log_table(p)
    assert np.all(powers[logs[1:]] == np.arange(1, p))
    inv = inverse_table(p)
    assert np.all((np.arange(1, p) * inv[1:]) % p == 1)


def test_factorize_and_phi():
    for n in range(1, 500):
        f = factorize(n)
        assert math.prod(p**e for p, e in f.items()) == n
        assert euler_phi(n) == sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)
    spf = smallest_prime_factors(100)
    assert spf[97] == 97 and spf[91] == 7


def test_root_table_group_law():
    for q in (1, 2, 7, 360, 997, 1000):
        t = root_table(q)
        assert np.max(np.abs(np.abs(t.values) - 1)) < 1e-12
        x = np.arange(q)
        y = (x * 7 + 3) % q
        assert np.max(np.abs(t(x) * t(y) - t((x + y) % q))) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10**6), st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_e_q_additive(q, x, y):
    assert abs(e_q(x, q) * e_q(y, q) - e_q(x + y, q)) < 1e-10
