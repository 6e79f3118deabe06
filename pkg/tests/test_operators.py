import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson_lab.geometry import inner
from carleson_lab.measures import Atomic, RadialPower, WeightedDensity, weighted_volume
from carleson_lab.operators import (FParams, HypothesisError, RayConfig, RayQuadratureWarning, ToeplitzSpec,
                                    cesaro, cesaro_apply, companion_apply, extremal_kernel, ig_trichotomy_check,
                                    ig_violations, jg_boundedness_check, jg_violations, multiplier_apply,
                                    operator_identities, regime, toeplitz_apply, toeplitz_compactness_probe,
                                    toeplitz_equivalence_check, toeplitz_norm_estimate)
from carleson_lab.operators import _image_norm
from carleson_lab.quadrature import DEFAULT, integrate_ball, normalizing_constant
from carleson_lab.spaces import (AnalyticFn, constant, g_log, kernel_combination, kernel_test_function, monomial)
from conftest import random_ball_points


def quadrature_image(mu, beta, f, z, n):
    """T f(z) by brute force over the density of a radial power measure."""
    sigma = n + 1 + beta
    val = integrate_ball(lambda w: f(w) * (1.0 - inner(z, w)) ** -sigma, mu.theta, n=n, foci=list(f.foci))
    return mu.coef * val / normalizing_constant(n, mu.theta)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("theta,beta", [(0.0, 0.0), (1.5, 1.0), (-0.5, 0.5)])
def test_kernel_image_closed_form(n, theta, beta):
    a = np.zeros(n, dtype=complex)
    a[0] = 0.7 * np.exp(0.4j)
    f = kernel_test_function(a, 1.3)
    mu = RadialPower(theta, 2.0)
    z = np.zeros(n, dtype=complex)
    z[0], z[-1] = 0.3 - 0.2j, 0.1 + 0.25j * (n - 1)
    got = toeplitz_apply(ToeplitzSpec(mu, beta, n=n), f, z)
    x = complex(inner(z, a))
    mass = 2.0 / normalizing_constant(n, theta)
    expect = complex(mpmath.hyp2f1(1.3, n + 1 + beta, n + 1 + theta, x)) * mass
    assert got == pytest.approx(expect, rel=1e-12)
    assert got == pytest.approx(quadrature_image(mu, beta, f, z, n), rel=1e-7)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_monomial_image_against_quadrature(k):
    mu = RadialPower(0.7)
    f = monomial(k) if k else constant(1.0)
    z = np.array([0.45 + 0.3j])
    got = toeplitz_apply(ToeplitzSpec(mu, 0.5), f, z)
    assert got == pytest.approx(quadrature_image(mu, 0.5, f, z, 1), rel=1e-9)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_reproducing(rng, n, beta):
    spec = ToeplitzSpec(weighted_volume(beta, n), beta, n=n)
    z = random_ball_points(rng, 20, n, 0.95)
    a = random_ball_points(rng, 1, n, 0.9)[0]
    for f in (monomial(4), kernel_test_function(a, 2.5)):
        assert np.allclose(toeplitz_apply(spec, f, z), f(z), rtol=1e-9)


def test_atomic_image_and_gram_norm():
    pts = np.array([[0.5], [0.2j], [-0.6 + 0.1j]])
    mu = Atomic(pts, np.array([1.0, 0.5, 2.0]))
    spec = ToeplitzSpec(mu, 1.0)
    f = kernel_test_function(np.array([0.3]), 2.0)
    z = np.array([[0.1 - 0.4j]])
    expect = sum(m * f(p[None])[0] * (1 - z[0, 0] * np.conj(p[0])) ** -3.0 for p, m in zip(pts, mu.masses))
    assert toeplitz_apply(spec, f, z)[0] == pytest.approx(expect, rel=1e-13)
    gram = _image_norm(spec, f, DEFAULT)
    img = lambda w: toeplitz_apply(spec, f, w)  # noqa: E731
    quad = math.sqrt(integrate_ball(lambda w: np.abs(img(w)) ** 2, 0.0, n=1, foci=list(pts)))
    assert gram == pytest.approx(quad, rel=1e-9)


coef = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@given(coef, coef)
@settings(max_examples=30, deadline=None)
def test_linearity(c1, c2):
    spec = ToeplitzSpec(RadialPower(0.5) + Atomic(np.array([[0.4j]]), np.array([1.0])), 1.0)
    pts = np.array([[0.3], [-0.5j]])
    combo = kernel_combination(pts, 2.0, [c1, c2])
    z = np.array([[0.2 + 0.1j], [-0.6]])
    parts = [toeplitz_apply(spec, kernel_test_function(p, 2.0), z) for p in pts]
    assert np.allclose(toeplitz_apply(spec, combo, z), c1 * parts[0] + c2 * parts[1], rtol=1e-10, atol=1e-12)


def test_hypotheses():
    bad = ToeplitzSpec(RadialPower(0.0), -0.9, p1=0.5)
    assert bad.hypothesis_violations()
    with pytest.raises(HypothesisError) as err:
        bad.check()
    assert err.value.violations
    with pytest.raises(HypothesisError):
        toeplitz_equivalence_check(ToeplitzSpec(RadialPower(0.0), 1.0, p1=4.0, p2=2.0))
    with pytest.raises(ValueError):
        ToeplitzSpec(RadialPower(0.0), -1.0)


def test_extremal_kernel_norms_bounded():
    spec = ToeplitzSpec(RadialPower(0.0), 1.0)
    from carleson_lab.carleson import kernel_norm_exact
    vals = []
    for r in (0.5, 0.9, 0.99, 0.999):
        f = extremal_kernel(spec, np.array([r]))
        vals.append(f.descriptor["scale"] * kernel_norm_exact(np.array([r]), spec.sigma, 2.0, 0.0))
    assert max(vals) / min(vals) < 2.0


@pytest.mark.parametrize("theta,bounded,compact", [(0.5, "unbounded", False), (1.0, "bounded", False),
                                                   (1.5, "bounded", True)])
def test_radial_toeplitz_classification(theta, bounded, compact):
    spec = ToeplitzSpec(RadialPower(theta), 1.0)
    rep = toeplitz_compactness_probe(spec, J=10)
    assert (rep["verdict"] == "compact") == compact
    if theta == 1.0:
        eq = toeplitz_equivalence_check(spec, trials=4)
        assert eq["operator_verdict"] == bounded and eq["consistent"]


def test_norm_estimate_seeded():
    spec = ToeplitzSpec(RadialPower(1.5), 1.0)
    a = toeplitz_norm_estimate(spec, trials=4, seed=2, J=4)
    b = toeplitz_norm_estimate(spec, trials=4, seed=2, J=4)
    assert a.value == b.value > 0


def test_cesaro_basics(rng):
    z = random_ball_points(rng, 30, 1, 0.99)
    assert np.allclose(cesaro_apply(monomial(1), constant(1.0), z), z[:, 0], rtol=1e-12)
    f = kernel_test_function(np.array([0.5j]), 2.0)
    assert np.allclose(companion_apply(constant(1.0), f, z), f(z) - f(np.zeros((1, 1)))[0], rtol=1e-10)
    assert np.allclose(multiplier_apply(monomial(2), f, z), z[:, 0] ** 2 * f(z))


def test_cesaro_of_log_near_sphere():
    z = np.array([[1 - 1e-6]])
    val = cesaro_apply(g_log(), constant(1.0), z)
    assert val[0] == pytest.approx(-np.log(1e-6), rel=1e-9)


def test_ray_warning_when_underresolved():
    with pytest.warns(RayQuadratureWarning):
        cesaro_apply(g_log(), constant(1.0), np.array([[1 - 1e-6]]), RayConfig(nodes=4, panel_nodes=2))


def test_nonvanishing_derivative_rejected():
    bogus = AnalyticFn(lambda z: z[:, 0], lambda z: np.ones(len(z), dtype=complex))
    with pytest.raises(ValueError):
        cesaro(bogus, constant(1.0))


@pytest.mark.parametrize("g,f", [(g_log(), monomial(2)), (kernel_test_function(np.array([0.8]), 1.5), g_log())])
def test_operator_identities(g, f):
    res = operator_identities(g, f, probes=200)
    assert max(res.values()) < 1e-7


def test_regimes_and_violations():
    assert regime(FParams(2, 0, 2, 3.0, 1.5)) == "i"
    assert regime(FParams(2, 0, 2, 2.0, 1.5)) == "ii"
    assert regime(FParams(2, 0, 2, 1.5, 1.5)) == "iii"
    assert jg_violations(FParams(2, 0, 2, 1.0, 1.5))
    assert not ig_violations(FParams(2, 0, 2, 1.0, 1.5))
    assert ig_violations(FParams(2, -1.5, 2, 1.0, 1.5))
    assert ig_violations(FParams(4, 0, 1, 1.0, 0.5))
    assert FParams(2, 0, 2, 3.0, 1.5).q == pytest.approx(4.0)


def test_jg_and_ig_checks():
    rep = jg_boundedness_check(g_log(), 2, 0, 2, 2.0, 1.5)
    assert rep["consistent"] and rep["operator_verdict"] == "bounded"
    with pytest.raises(HypothesisError):
        jg_boundedness_check(g_log(), 2, 0, 2, 1.0, 1.5)
    rep = ig_trichotomy_check(g_log(), 2, 0, 2, 2.0, 1.5)
    assert rep["regime"] == "ii" and rep["consistent"] and rep["operator_verdict"] == "unbounded"
