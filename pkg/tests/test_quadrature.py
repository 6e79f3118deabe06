import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy import special

from carleson_lab.geometry import inner
from carleson_lab.quadrature import (DEFAULT, KernelResolutionWarning, QuadConfig, integrate_ball,
                                     integrate_qmc, integrate_radial, normalizing_constant)


def monomial_norm_sq(k, n, alpha):
    return math.exp(special.gammaln(k + 1) + special.gammaln(n + alpha + 1) - special.gammaln(n + k + alpha + 1))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
def test_normalizing_constant(n, alpha):
    expect = special.gamma(n + alpha + 1) / (special.factorial(n) * special.gamma(alpha + 1))
    assert normalizing_constant(n, alpha) == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
def test_total_mass(n, alpha):
    assert integrate_ball(lambda z: np.ones(len(z)), alpha, n=n) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0])
@pytest.mark.parametrize("k", [1, 3, 6])
def test_monomial_norms(n, alpha, k):
    val = integrate_ball(lambda z: np.abs(z[:, 0]) ** (2 * k), alpha, n=n)
    assert val == pytest.approx(monomial_norm_sq(k, n, alpha), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2])
def test_holomorphic_mean_value(n):
    val = integrate_ball(lambda z: z[:, 0] ** 3 + z[:, -1], 0.5, n=n)
    assert abs(val) < 1e-12


@pytest.mark.parametrize("n,alpha,s,r", [(1, 0.0, 1.0, 0.9), (1, 1.0, 1.7, 0.99), (2, 0.0, 1.2, 0.95)])
def test_kernel_integral_against_hypergeometric(n, alpha, s, r):
    a = np.zeros(n, dtype=complex)
    a[0] = r * np.exp(0.3j)
    val = integrate_ball(lambda z: np.abs(1.0 - inner(z, a)) ** (-2 * s), alpha, n=n, foci=[a])
    expect = float(mpmath.hyp2f1(s, s, n + 1 + alpha, r * r))
    assert val == pytest.approx(expect, rel=1e-7)


def test_radial_reduction():
    # int |z|^4 dv_1 on B_2 = Gamma(4) Gamma(4) / (1! Gamma(6))
    assert integrate_radial(lambda u: u**2, 2, 1.0) == pytest.approx(0.3, rel=1e-12)
    partial, full = integrate_radial(lambda u: np.ones_like(u), 1, 0.0, radii=(0.5,))
    assert full == pytest.approx(1.0, rel=1e-12)
    assert partial[0] == pytest.approx(0.25, rel=1e-12)


def test_qmc_rough_agreement():
    val = integrate_qmc(lambda z: np.abs(z[:, 0]) ** 2, 0.0, 3, QuadConfig(mc_samples=1 << 14))
    assert val == pytest.approx(monomial_norm_sq(1, 3, 0.0), rel=2e-2)


def test_config_validation_and_roundtrip():
    with pytest.raises(ValueError):
        QuadConfig(radial_nodes=0)
    with pytest.raises(ValueError):
        QuadConfig.from_dict({"nodes": 3})
    assert QuadConfig.from_dict(DEFAULT.to_dict()) == DEFAULT
    assert DEFAULT.scaled(0.5).radial_nodes == DEFAULT.radial_nodes // 2


def test_resolution_warning_near_sphere():
    a = np.array([1.0 - 1e-8])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        integrate_ball(lambda z: np.abs(1.0 - inner(z, a)) ** -2.0, 0.0, n=1, foci=[a])
    assert any(issubclass(w.category, KernelResolutionWarning) for w in caught)
