import numpy as np
import pytest

from carleson_lab.geometry import bergman_dist
from carleson_lab.lattice import (Lattice, build_lattice, packing_overlap_bound, sample_truncated_ball,
                                  verify_lattice)


@pytest.fixture(scope="module")
def lat():
    return build_lattice(0.5, 1, 1e-2)


def test_covering_and_separation(lat):
    rep = verify_lattice(lat, probes=5000, seed=3)
    assert rep["separation_ok"]
    assert rep["covering_misses"] == 0
    assert rep["max_overlap"] <= packing_overlap_bound(1, lat.r, lat.r / 2)


def test_points_in_truncated_ball(lat):
    assert np.all(np.abs(lat.points[:, 0]) <= 1 - lat.truncation + 1e-12)


def test_brute_force_separation(lat):
    pts = lat.points[:400]
    d = bergman_dist(pts[:, None, :], pts[None, :, :], check=False)
    np.fill_diagonal(d, np.inf)
    assert d.min() >= lat.r / 2


def test_json_roundtrip(lat):
    back = Lattice.from_json(lat.to_json())
    assert np.array_equal(back.points, lat.points)
    assert back.r == lat.r and back.truncation == lat.truncation


def test_deterministic():
    a = build_lattice(1.0, 1, 1e-2, seed=5)
    b = build_lattice(1.0, 1, 1e-2, seed=5)
    assert np.array_equal(a.points, b.points)


def test_ball2_small():
    lat = build_lattice(1.0, 2, 0.2)
    rep = verify_lattice(lat, probes=2000)
    assert rep["separation_ok"] and rep["covering_misses"] == 0


def test_trivial_lattice_when_ball_covers():
    lat = build_lattice(3.0, 1, 0.5)
    assert len(lat) == 1


def test_argument_validation():
    with pytest.raises(ValueError):
        build_lattice(0.0)
    with pytest.raises(ValueError):
        build_lattice(0.5, 1, 1.5)
    with pytest.raises(NotImplementedError):
        build_lattice(0.5, 3)
    with pytest.raises(ValueError):
        verify_lattice(build_lattice(3.0, 1, 0.5), probes=0)


def test_sampler_stays_inside():
    pts = sample_truncated_ball(1000, 2, 0.9, seed=1)
    assert np.all(np.linalg.norm(pts, axis=1) <= 0.9)


def test_packing_bound_monotone():
    assert packing_overlap_bound(1, 0.5, 0.25) > packing_overlap_bound(1, 0.5, 0.5)
