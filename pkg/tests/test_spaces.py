import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from carleson_lab.quadrature import KernelResolutionWarning
from carleson_lab.spaces import (battery, bergman_norm, bloch_norm, boundary_power, constant, fpqs_integral,
                                 fpqs_norm, g_log, growth_norm, kernel_combination, kernel_test_function,
                                 little_bloch_probe, monomial, normalized_kernel, product, rderiv_consistency)
from conftest import random_ball_points


@pytest.mark.parametrize("n,r,sigma,alpha", [(1, 0.9, 1.0, 0.0), (1, 0.99, 2.0, 1.0), (2, 0.8, 1.5, 0.5)])
def test_kernel_norm_exact(n, r, sigma, alpha):
    a = np.zeros(n, dtype=complex)
    a[-1] = r * 1j
    val = bergman_norm(kernel_test_function(a, sigma), 2.0, alpha)
    assert val**2 == pytest.approx(float(mpmath.hyp2f1(sigma, sigma, n + 1 + alpha, r * r)), rel=1e-8)


@pytest.mark.parametrize("k", [0, 1, 4])
@pytest.mark.parametrize("alpha", [0.0, 2.0])
def test_monomial_norm(k, alpha):
    expect = math.exp(special.gammaln(k + 1) + special.gammaln(2 + alpha) - special.gammaln(2 + k + alpha))
    assert bergman_norm(monomial(k), 2.0, alpha, n=1) ** 2 == pytest.approx(expect, rel=1e-10)


def test_normalized_kernels_uniformly_bounded():
    vals = [bergman_norm(normalized_kernel(np.array([r]), 2.0, 0.0), 2.0, 0.0) for r in (0.5, 0.9, 0.99)]
    assert max(vals) < 2 * min(vals)


def test_unresolved_focus_warns_and_blows_up():
    f = kernel_test_function(np.array([1 - 1e-12]), 1.5)
    with pytest.warns(KernelResolutionWarning):
        assert bergman_norm(f, 2.0, 0.0) > 1e3


def test_bloch_of_log():
    # |R g| (1 - |z|^2) = r (1 - r^2) / (1 - r) on the positive axis, sup 2
    assert bloch_norm(g_log(), 1.0, n=1, J=14) == pytest.approx(2.0, rel=1e-3)
    assert little_bloch_probe(g_log(), 1.0, n=1).verdict == "not_vanishing"
    assert little_bloch_probe(monomial(3), 1.0, n=1).verdict == "vanishing"


def test_growth_norm_of_kernel():
    f = kernel_test_function(np.array([0.5]), 1.0)
    # |f| (1 - |z|^2) <= (1 + |z|) / |1 - z/2| ... sup is finite and positive
    assert 0 < growth_norm(f, 1.0, n=1) < 4


def test_fpqs_monomial_at_origin():
    e = 0.7
    val = fpqs_integral(monomial(1), 2.0, 0.2, 0.5, np.zeros(1), n=1)
    assert val == pytest.approx(special.beta(2, e + 1), rel=1e-10)
    with pytest.raises(ValueError):
        fpqs_norm(monomial(1), 2.0, -3.0, 0.5, n=1)


@pytest.mark.parametrize("n", [1, 2])
def test_rderiv_consistency(rng, n):
    z = random_ball_points(rng, 50, n, 0.9)
    for f in battery(n=n):
        assert rderiv_consistency(f, z) < 1e-6, f.name


def test_product_leibniz(rng):
    z = random_ball_points(rng, 40, 1, 0.9)
    f = product([kernel_test_function(np.array([0.7j]), 2.0), monomial(2), g_log()])
    assert rderiv_consistency(f, z) < 1e-6


def test_combination_matches_sum(rng):
    pts = np.array([[0.3], [0.8j]])
    c = np.array([2.0, -1.0 + 1j])
    combo = kernel_combination(pts, 1.5, c)
    z = random_ball_points(rng, 30, 1, 0.9)
    direct = sum(cj * kernel_test_function(p, 1.5)(z) for cj, p in zip(c, pts))
    assert np.allclose(combo(z), direct, rtol=1e-13)
    assert combo.descriptor["size"] == 2
    with pytest.raises(ValueError):
        kernel_combination(pts, 1.5, [1.0])


@given(st.floats(0.3, 4.0), st.complex_numbers(max_magnitude=0.95, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_boundary_power_derivative(sigma, w):
    g = boundary_power(sigma)
    z = np.array([[w]])
    assert g(np.zeros((1, 1)))[0] == pytest.approx(0.0, abs=1e-15)
    assert rderiv_consistency(g, z) < 1e-5


def test_validation():
    with pytest.raises(ValueError):
        monomial(-1)
    with pytest.raises(ValueError):
        kernel_test_function(np.array([0.5]), 0.0)
    with pytest.raises(ValueError):
        battery("v0")
    with pytest.raises(ValueError):
        bergman_norm(constant(1.0), 0.0, 0.0, n=1)
