"""Bound formulas for the twisted sums, with exponents kept as exact fractions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import RangeConstraintViolated


def theta(d: int) -> Fraction:
    """Standard level of distribution 2/(d+1)."""
    return Fraction(2, d + 1)


def tau(d: int) -> Fraction:
    """Landau exponent (d-1)/(d+1)."""
    return Fraction(d - 1, d + 1)


@dataclass(frozen=True)
class BoundConstants:
    theta3: Fraction = Fraction(5, 14)
    degrees: tuple = (2, 3, 4, 5, 6)
    theta_table: dict = field(init=False)
    tau_table: dict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "theta_table", {d: theta(d) for d in self.degrees})
        object.__setattr__(self, "tau_table", {d: tau(d) for d in self.degrees})

    @property
    def main_exponent(self) -> Fraction:
        """(2 - theta3) / (3 - 2 theta3)."""
        return (2 - self.theta3) / (3 - 2 * self.theta3)

    @property
    def modulus_exponent(self) -> Fraction:
        """(1 - theta3) / (3 - 2 theta3)."""
        return (1 - self.theta3) / (3 - 2 * self.theta3)

    @property
    def R_exponent(self) -> Fraction:
        """1 / (3 - 2 theta3)."""
        return 1 / (3 - 2 * self.theta3)


CONSTANTS = BoundConstants()

# q <= X^{2/7 + 1/364} in the progression corollary
COROLLARY_LEVEL = Fraction(2, 7) + Fraction(1, 364)


def bound_thm1(X: float, Z: float, q0: float, q1: float, khat1: float = 1.0) -> float:
    """khat1 (Z^1/2 X^1/2 q0^1/2 + Z X^1/2 q^1/2 q0^-1/4 + Z q^1/2 q0^1/4), q = q0 q1."""
    q = q0 * q1
    return khat1 * (Z**0.5 * X**0.5 * q0**0.5 + Z * X**0.5 * q**0.5 * q0**-0.25 + Z * q**0.5 * q0**0.25)


def thm2_threshold(Z: float, q: float, q0: float) -> float:
    """Smallest admissible X, namely Z^4 q^2 q0^(1/2)."""
    return Z**4 * q**2 * q0**0.5


def _check_range(X: float, Z: float, q: float, q0: float) -> None:
    lo = thm2_threshold(Z, q, q0)
    # relative slack keeps the exact boundary admissible under rounding
    if X < lo * (1 - 1e-12):
        raise RangeConstraintViolated(f"X = {X:g} below Z^4 q^2 q0^1/2 = {lo:g}")


def bound_thm2(X: float, Z: float, q0: float, q1: float, constants: BoundConstants = CONSTANTS) -> float:
    q = q0 * q1
    _check_range(X, Z, q, q0)
    a = float(constants.main_exponent)
    b = float(constants.modulus_exponent)
    return Z**2 * (
        X**0.75 * q0**0.75
        + X**a * (q**2 * q0**0.5) ** b
        + X / q0**0.25
        + X**0.75 * q / q0**0.5
    )


def compute_R(X: float, Z: float, q: float, q0: float, constants: BoundConstants = CONSTANTS) -> float:
    """R = (X / (Z^4 q^2 q0^1/2))^(1/(3 - 2 theta3))."""
    _check_range(X, Z, q, q0)
    ratio = X / thm2_threshold(Z, q, q0)
    return max(1.0, ratio) ** float(constants.R_exponent)


def ap_corollary_bound(X: float, q: float) -> tuple[float, bool]:
    """(X^1/4 q^8/5 + q^23/10, whether q <= X^(15/52))."""
    value = X**0.25 * q**1.6 + q**2.3
    return value, q <= X ** float(COROLLARY_LEVEL)
