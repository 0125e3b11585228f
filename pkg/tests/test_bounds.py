from fractions import Fraction

import numpy as np
import pytest

from twistlab import bounds
from twistlab.errors import RangeConstraintViolated


def test_exponent_tables():
    c = bounds.CONSTANTS
    assert c.theta_table[2] == Fraction(2, 3) and c.theta_table[3] == Fraction(1, 2)
    assert c.theta_table[6] == Fraction(2, 7)
    assert c.tau_table[6] == Fraction(5, 7)
    assert c.main_exponent == Fraction(23, 32)
    assert c.modulus_exponent == Fraction(9, 32)
    assert c.R_exponent == Fraction(7, 16)
    assert bounds.COROLLARY_LEVEL == Fraction(15, 52)


def test_bound_thm1():
    assert bounds.bound_thm1(1, 1, 1, 1) == 3
    assert bounds.bound_thm1(1, 1, 1, 1, khat1=2.5) == 7.5
    X, Z, q0, q1 = 1e5, 1.0, 2063, 47
    q = q0 * q1
    terms = [Z**0.5 * X**0.5 * q0**0.5, Z * X**0.5 * q**0.5 * q0**-0.25, Z * q**0.5 * q0**0.25]
    assert bounds.bound_thm1(X, Z, q0, q1) == pytest.approx(sum(terms), rel=1e-14)
    assert bounds.bound_thm1(X, Z, q0, q1) == pytest.approx(31072.508008166606, rel=1e-12)
    # doubling X scales the first two terms by sqrt(2)
    doubled = bounds.bound_thm1(2 * X, Z, q0, q1)
    assert doubled - terms[2] == pytest.approx(np.sqrt(2) * (terms[0] + terms[1]), rel=1e-13)


def test_bound_thm2():
    assert bounds.bound_thm2(1, 1, 1, 1) == 4
    with pytest.raises(RangeConstraintViolated):
        bounds.bound_thm2(100, 1, 13, 5)
    X = bounds.thm2_threshold(1, 65, 13)
    assert bounds.bound_thm2(X, 1, 13, 5) > 0


def test_compute_R():
    Z, q0, q1 = 1.3, 13, 5
    q = q0 * q1
    base = Z**4 * q**2 * q0**0.5
    assert bounds.compute_R(base, Z, q, q0) == pytest.approx(1.0, abs=1e-12)
    assert bounds.compute_R(2 ** (16 / 7) * base, Z, q, q0) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(RangeConstraintViolated):
        bounds.compute_R(0.5 * base, Z, q, q0)


def test_ap_corollary_bound():
    assert bounds.ap_corollary_bound(1, 1) == (2.0, True)
    # 10^6 to the 15/52 is about 53.9
    assert bounds.ap_corollary_bound(10**6, 53)[1]
    assert not bounds.ap_corollary_bound(10**6, 54)[1]
    value, _ = bounds.ap_corollary_bound(10**4, 3)
    assert value == pytest.approx(10 * 3**1.6 + 3**2.3, rel=1e-14)


def test_bounds_monotone():
    Xs = np.geomspace(1e4, 1e9, 30)
    for Z in (1.0, 2.0):
        b1 = [bounds.bound_thm1(X, Z, 101, 7) for X in Xs]
        assert all(np.diff(b1) > 0)
        hi = [bounds.bound_thm2(X, Z, 11, 3) for X in Xs if X >= bounds.thm2_threshold(Z, 33, 11)]
        assert all(np.diff(hi) > 0)
    for X in (1e5, 1e7):
        zs = [1.0, 1.5, 2.0, 4.0]
        assert all(np.diff([bounds.bound_thm1(X, Z, 101, 7) for Z in zs]) > 0)
        assert all(np.diff([bounds.bound_thm2(1e9, Z, 11, 3) for Z in zs]) > 0)
    assert all(np.diff([bounds.ap_corollary_bound(X, 30)[0] for X in Xs]) > 0)
