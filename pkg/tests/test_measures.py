import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from carleson_lab.geometry import ball_ellipsoid, bergman_dist
from carleson_lab.quadrature import QuadConfig
from carleson_lab.measures import (Atomic, RadialPower, Sum, WeightedDensity, atom, ball_mass, berezin,
                                   berezin_quadrature, kernel_integral, khat, measure_from_dict, measure_to_dict,
                                   parse_measure_shorthand, weighted_volume, zero_measure)


def disk_ball_mass_oracle(theta, c, r):
    """(1 - |x|^2)^theta dA/pi over the Euclidean disk D(c, r) is."""
    ctr, rad, _ = ball_ellipsoid(np.array([c]), r)
    ctr = complex(ctr[0])

    def f(rho, phi):
        x = ctr + rho * np.exp(1j * phi)
        return (1.0 - abs(x) ** 2) ** theta * rho / math.pi

    return integrate.dblquad(f, 0.0, 2 * math.pi, 0.0, rad, epsabs=1e-13, epsrel=1e-11)[0]


@pytest.mark.parametrize("theta", [-0.5, 0.0, 1.0, 2.5])
@pytest.mark.parametrize("c", [0.0, 0.6, 0.95j, 0.99])
@pytest.mark.parametrize("r", [0.5, 1.0])
def test_ball_mass_disk(theta, c, r):
    val = ball_mass(RadialPower(theta), np.array([c]), r)
    oracle = disk_ball_mass_oracle(theta, c, r)
    assert val == pytest.approx(oracle, rel=1e-5)
    fine = ball_mass(RadialPower(theta), np.array([c]), r, QuadConfig(radial_nodes=512, angular_nodes=1024))
    assert fine == pytest.approx(oracle, rel=1e-10)


def test_ball_mass_at_origin_b2():
    R2 = math.tanh(0.7) ** 2
    expect = integrate.quad(lambda u: 2 * u * (1 - u) ** 1.5, 0, R2)[0]
    assert ball_mass(RadialPower(1.5), np.zeros(2), 0.7) == pytest.approx(expect, rel=1e-9)


def test_khat_normalisation():
    z = np.array([0.3, 0.6j])
    mu = RadialPower(1.0)
    expect = ball_mass(mu, z, 0.5) / (1.0 - 0.45) ** (2 + 1 + 0.5)
    assert khat(mu, 0.5, 0.5, z) == pytest.approx(expect, rel=1e-14)


def test_atomic_masses():
    mu = Atomic(np.array([[0.5], [0.9j]]), np.array([1.0, 2.0]))
    assert ball_mass(mu, np.array([0.5]), 0.1) == 1.0
    assert ball_mass(mu, np.array([0.0]), 5.0) == 3.0
    d = float(bergman_dist(np.array([0.0]), np.array([0.9j])))
    assert ball_mass(mu, np.array([0.0]), d * 0.999) == 1.0
    with pytest.raises(ValueError):
        Atomic(np.array([[0.1]]), np.array([-1.0]))


@pytest.mark.parametrize("n,theta,E,r", [(1, 0.0, 2.5, 0.9), (1, 1.5, 3.5, 0.99), (2, 0.5, 3.7, 0.95)])
def test_kernel_integral_hypergeometric(n, theta, E, r):
    a = np.zeros(n, dtype=complex)
    a[0] = r
    val = kernel_integral(weighted_volume(theta, n), a, E)
    expect = float(mpmath.hyp2f1(E / 2, E / 2, n + 1 + theta, r * r))
    assert val == pytest.approx(expect, rel=1e-9)


@pytest.mark.parametrize("mu", [RadialPower(0.5), RadialPower(0.0) + atom(np.array([0.3, 0.2j]), 0.5)])
def test_berezin_routes_agree(mu):
    z = np.array([0.4 + 0.1j, -0.3])
    if isinstance(mu, Sum):
        z = np.array([0.4 + 0.1j, -0.3])
    a = berezin(mu, 1.0, 0.0, z)
    b = berezin_quadrature(mu, 1.0, 0.0, z)
    assert a == pytest.approx(b, rel=1e-6)


def test_berezin_needs_positive_s():
    with pytest.raises(ValueError):
        berezin(RadialPower(0.0), 0.0, 0.0, np.array([0.1]))


def test_weighted_density_validation():
    with pytest.raises(ValueError):
        RadialPower(-1.0)
    with pytest.raises(ValueError):
        WeightedDensity("nope", 0.0)
    with pytest.raises(ValueError):
        RadialPower(0.0, -1.0)


def test_radial_moments_and_total_mass():
    mu = RadialPower(1.0, 2.0)
    assert mu.total_mass(1) == pytest.approx(1.0)  # 2 * int (1-|z|^2) dA/pi = 2 * 1/2
    assert mu.radial_moments(np.array([0.0]), 1)[0] == pytest.approx(1.0)


thetas = st.floats(min_value=-0.9, max_value=5.0, allow_nan=False)
coords = st.tuples(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))


@given(thetas, st.floats(0.1, 10.0), st.lists(st.tuples(coords, st.floats(0.01, 5.0)), max_size=3))
@settings(max_examples=50, deadline=None)
def test_dict_roundtrip(theta, coef, atoms):
    parts = [RadialPower(theta, coef)]
    if atoms:
        pts = np.array([[complex(x, y)] for (x, y), _ in atoms])
        parts.append(Atomic(pts, np.array([m for _, m in atoms])))
    mu = Sum(tuple(parts))
    back = measure_from_dict(measure_to_dict(mu))
    z = np.array([[0.2], [0.5j], [-0.7]])
    assert np.allclose(back.ball_masses(z, 0.8), mu.ball_masses(z, 0.8), rtol=1e-12)


def test_shorthand_and_errors():
    assert parse_measure_shorthand("radial_power:0.5").theta == 0.5
    a = parse_measure_shorthand("atom:0.3,0.4j@2")
    assert a.masses[0] == 2.0 and a.points.shape == (1, 2)
    assert parse_measure_shorthand("zero").is_zero()
    assert zero_measure().is_zero()
    with pytest.raises(ValueError):
        parse_measure_shorthand("blob:1")
    with pytest.raises(ValueError):
        measure_from_dict({"type": "radial_power", "theta": 0, "colour": 1})


def test_scaling():
    mu = 3.0 * (RadialPower(0.0) + atom(np.array([0.5])))
    base = RadialPower(0.0) + atom(np.array([0.5]))
    z = np.array([[0.5]])
    assert mu.ball_masses(z, 0.5)[0] == pytest.approx(3 * base.ball_masses(z, 0.5)[0])
    assert atom(np.array([0.5])).scale(0.0).is_zero()
