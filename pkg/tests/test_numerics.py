import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import special

from twistlab import bessel
from twistlab.errors import QuadratureFailure
from twistlab.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate
from twistlab.window import SmoothWindow, smooth_step


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    # G7 integrates x^13 exactly, K15 integrates x^22 exactly
    assert np.dot(GAUSS_WEIGHTS, NODES**12) == pytest.approx(2 / 13, abs=1e-14)
    assert np.dot(KRONROD_WEIGHTS, NODES**22) == pytest.approx(2 / 23, abs=1e-14)


def test_integrate_against_scipy():
    cases = [
        (np.sin, 0.0, math.pi),
        (lambda x: np.exp(-x * x), -3.0, 2.0),
        (lambda x: np.sqrt(x), 0.0, 1.0),
        (lambda x: np.cos(50 * x) / (1 + x * x), 0.0, 4.0),
    ]
    for f, a, b in cases:
        ref = sci_integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
        res = integrate(f, a, b, tol=1e-11)
        assert abs(res.value - ref) < 1e-10
        assert res.error <= 1e-11


def test_integrate_batched_components():
    xi = np.array([0.0, 1.0, 2.5])
    res = integrate(lambda u: np.exp(-2j * np.pi * np.outer(u, xi)), 0.0, 1.0, tol=1e-12)
    exact = np.where(xi == 0, 1.0, (1 - np.exp(-2j * np.pi * xi)) / (2j * np.pi * np.where(xi == 0, 1, xi)))
    assert np.max(np.abs(res.value - exact)) < 1e-11


def test_integrate_failure_and_empty():
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: np.sign(x - 0.3), 0.0, 1.0, tol=1e-15, max_panels=20)
    assert integrate(np.cos, 1.0, 1.0).value == 0


@pytest.mark.parametrize("n", [0, 1, 2, 11, 15, 25])
def test_bessel_against_scipy(n):
    x = np.concatenate([np.linspace(0, 60, 3001), np.geomspace(60, 2000, 300)])
    err = np.max(np.abs(bessel.jn(n, x) - special.jv(n, x)))
    assert err < 1e-11


def test_bessel_regimes_agree_on_overlap():
    # both regimes evaluated on either side of the switch point
    for n in (0, 1, 11):
        s = bessel.switch_point(n)
        x = np.linspace(s - 5, s + 5, 201)
        assert np.max(np.abs(bessel.jn_series(n, x) - bessel.jn_large(n, x))) < 1e-10


def test_bessel_integral_representation():
    # J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
    for n in (0, 11):
        for x in (0.5, 19.9, 20.1, 45.0):
            ref = integrate(lambda t: np.cos(n * t - x * np.sin(t)), 0.0, math.pi, tol=1e-13).value / math.pi
            assert abs(bessel.jn(n, np.array([x]))[0] - ref) < 1e-11


def test_bessel_domain():
    with pytest.raises(ValueError):
        bessel.jn(-1, 1.0)
    with pytest.raises(ValueError):
        bessel.jn(1, -1.0)


def test_smooth_step():
    t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert np.allclose(smooth_step(t), [0, 0, 0.5, 1, 1])
    s = np.linspace(0.01, 0.99, 50)
    assert np.allclose(smooth_step(s) + smooth_step(1 - s), 1)


def test_window_support_and_plateau():
    for Z in (1.0, 2.0, 5.0):
        V = SmoothWindow(Z)
        x = np.linspace(0, 3, 3001)
        v = V(x)
        assert np.all(v[(x <= 1) | (x >= 2)] == 0)
        assert np.all((v >= 0) & (v <= 1))
        if Z >= 2:
            inner = (x >= 1 + 1 / Z) & (x <= 2 - 1 / Z)
            assert np.all(v[inner] == 1)
    with pytest.raises(ValueError):
        SmoothWindow(0.5)


def test_window_derivative_constants():
    for Z in (1.0, 3.0):
        V = SmoothWindow(Z)
        c = V.derivative_constants()
        assert len(c) == V.J + 1
        x = np.linspace(1, 2, 4001)
        for j in range(V.J + 1):
            assert np.max(np.abs(V.derivative(j, x))) <= c[j] * Z**j * 1.01 + 1e-12
    # first derivative against a central difference with a much finer step
    V = SmoothWindow(1.0)
    x = np.linspace(1.1, 1.9, 9)
    fine = (V(x + 1e-6) - V(x - 1e-6)) / 2e-6
    assert np.max(np.abs(V.derivative(1, x) - fine)) < 1e-5


def test_window_fourier_against_scipy():
    V = SmoothWindow(2.0)
    xi = np.array([0.0, 0.3, 1.0, 4.0, 12.5])
    got = V.fourier(xi, tol=1e-12)
    for x, g in zip(xi, got):
        re = sci_integrate.quad(lambda u: float(V(u)) * math.cos(2 * math.pi * u * x), 1, 2, epsabs=1e-14, limit=400)[0]
        im = sci_integrate.quad(lambda u: -float(V(u)) * math.sin(2 * math.pi * u * x), 1, 2, epsabs=1e-14, limit=400)[0]
        assert abs(g - complex(re, im)) < 1e-11


def test_zero_window():
    V = SmoothWindow(1.0, amplitude=0.0)
    assert not np.any(V(np.linspace(0, 3, 50)))
    assert V.derivative_constants() == [0.0] * (V.J + 1)
