import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson_lab.geometry import (DomainError, MetricBall, ball_euclidean_hull, ball_membership, bergman_dist,
                                   from_real, inner, mobius, norm2, one_minus_mobius_sq, point, pseudo_hyperbolic,
                                   to_real, unitary_to_e1)
from conftest import random_ball_points

disk = st.complex_numbers(max_magnitude=0.97, allow_nan=False, allow_infinity=False)


def test_point_rejects_outside():
    with pytest.raises(DomainError):
        point(1.0)
    with pytest.raises(DomainError):
        point(0.8, 0.8)
    assert point(0.3, 0.4j).shape == (2,)


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        mobius(point(0.1), point(0.1, 0.2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mobius_involution_and_identity(rng, n):
    a = random_ball_points(rng, 1, n)[0]
    z = random_ball_points(rng, 200, n)
    assert np.allclose(mobius(a, mobius(a, z)), z, atol=1e-12)
    assert np.allclose(mobius(a, a[None, :]), 0.0, atol=1e-14)
    lhs = 1.0 - norm2(mobius(a, z))
    rhs = (1.0 - norm2(a)) * (1.0 - norm2(z)) / np.abs(1.0 - inner(z, a)) ** 2
    assert np.allclose(lhs, rhs, rtol=1e-12)
    assert np.allclose(one_minus_mobius_sq(a, z), rhs, rtol=1e-12)


@given(disk, disk)
@settings(max_examples=200, deadline=None)
def test_disk_pseudo_hyperbolic_closed_form(a, b):
    rho = float(pseudo_hyperbolic(np.array([a]), np.array([b])))
    expect = abs(a - b) / abs(1 - a * np.conj(b))
    assert rho == pytest.approx(expect, rel=1e-10, abs=1e-15)
    assert float(bergman_dist(np.array([a]), np.array([b]))) == pytest.approx(np.arctanh(expect), rel=1e-10, abs=1e-15)


@given(disk, disk, disk)
@settings(max_examples=200, deadline=None)
def test_triangle_inequality(a, b, c):
    A, B, C = (np.array([x]) for x in (a, b, c))
    assert bergman_dist(A, C) <= bergman_dist(A, B) + bergman_dist(B, C) + 1e-9


def test_unitary_invariance(rng):
    a, z, w = random_ball_points(rng, 3, 3)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    assert float(bergman_dist(q @ z, q @ w)) == pytest.approx(float(bergman_dist(z, w)), rel=1e-10)
    U = unitary_to_e1(a)
    assert np.allclose(U @ a, [np.linalg.norm(a), 0, 0], atol=1e-14)
    assert np.allclose(U @ U.conj().T, np.eye(3), atol=1e-14)


def test_close_points_no_cancellation():
    z = np.array([0.999999])
    w = np.array([0.999999 + 1e-13])
    rho = float(pseudo_hyperbolic(z, w))
    d = w[0] - z[0]
    expect = d / (1 - z[0] * w[0])
    assert rho == pytest.approx(expect, rel=1e-9)


@pytest.mark.parametrize("n", [1, 2])
def test_ball_hull_contains_ball(rng, n):
    ball = MetricBall(random_ball_points(rng, 1, n, 0.9)[0], 0.8)
    lo, hi = ball_euclidean_hull(ball)
    pts = random_ball_points(rng, 20000, n, 0.9999)
    inside = ball_membership(ball, pts)
    x = to_real(pts[inside])
    assert inside.any()
    assert np.all(x >= lo) and np.all(x <= hi)
    assert np.allclose(from_real(to_real(pts)), pts)
