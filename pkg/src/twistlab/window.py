"""Smooth test windows supported on [1, 2] and their Fourier transforms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .quadrature import DEFAULT_TOL, integrate


def _glue(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """psi(t): 0 for t <= 0, 1 for t >= 1, C-infinity in between."""
    t = np.asarray(t, dtype=np.float64)
    a = _glue(t)
    b = _glue(1.0 - t)
    return a / (a + b)


@dataclass(frozen=True)
class SmoothWindow:
    """V_Z(x) = amplitude * psi(Z(x-1)) psi(Z(2-x)), so |V^(j)| << Z^j.

    amplitude defaults to 1; amplitude 0 gives the zero window.
    """

    Z: float = 1.0
    J: int = 4
    amplitude: float = 1.0
    support: tuple = field(default=(1.0, 2.0), init=False)

    def __post_init__(self):
        if self.Z < 1:
            raise ValueError(f"Z must be >= 1, got {self.Z}")
        if self.J < 0:
            raise ValueError("derivative cap J must be >= 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.amplitude * smooth_step(self.Z * (x - 1.0)) * smooth_step(self.Z * (2.0 - x))

    def derivative(self, j: int, x, h: float | None = None) -> np.ndarray:
        """j-th derivative by a central finite difference of step h (default 1e-3/Z)."""
        x = np.asarray(x, dtype=np.float64)
        h = (1e-3 / self.Z) if h is None else h
        acc = np.zeros_like(x)
        for i in range(j + 1):
            acc += (-1) ** i * comb(j, i) * self(x + (j / 2 - i) * h)
        return acc / h**j

    def derivative_constants(self, points: int = 20001) -> list[float]:
        """Measured c_j = max |V^(j)| / Z^j for 0 <= j <= J."""
        return [abs(self.amplitude) * c for c in _derivative_constants(float(self.Z), self.J, points)]

    def fourier(self, xi, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Vhat(xi) = integral of V(u) e(-u xi) du, by adaptive quadrature."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        # panels scale with the oscillation count so the adaptive pass starts resolved
        panels = max(4, int(np.max(np.abs(xi))) + 4) if xi.size else 1
        res = integrate(
            lambda u: self(u)[:, None] * np.exp(-2j * np.pi * np.outer(u, xi)),
            1.0, 2.0, tol=tol, initial_panels=panels,
        )
        return res.value


@lru_cache(maxsize=64)
def _derivative_constants(Z: float, J: int, points: int) -> tuple:
    w = SmoothWindow(Z, J)
    x = np.linspace(1.0, 2.0, points)
    return tuple(float(np.max(np.abs(w.derivative(j, x)))) / Z**j for j in range(J + 1))
