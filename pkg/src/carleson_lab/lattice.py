"""Greedy r-lattices in the Bergman metric and their verification.

Construction: candidates come from a hyperbolic shell grid with covering radius
h (r/4 on the disk, 0.45 r on B_2); they are swept by increasing distance to the origin and a candidate is
accepted when it lies at Bergman distance >= r - h from every accepted point.
Maximality then gives covering by D(a_k, r), and r - h >= r/2 gives the
separation needed for disjoint D(a_k, r/4).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import bergman_dist, euclidean_radius_bound, norm2, to_real

MAX_CANDIDATES = 4_000_000


class LatticeBudgetError(RuntimeError):
    def __init__(self, msg, achieved_radius):
        super().__init__(msg)
        self.achieved_radius = achieved_radius


@dataclass
class Lattice:
    r: float
    points: np.ndarray  # (K, n) complex
    truncation: float
    overlap_bound: int = 0
    separation: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> str:
        return json.dumps({
            "r": self.r,
            "truncation": self.truncation,
            "overlap_bound": int(self.overlap_bound),
            "points": [[[float(c.real), float(c.imag)] for c in p] for p in self.points],
        })

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        d = json.loads(text)
        pts = np.array([[complex(re, im) for re, im in p] for p in d["points"]], dtype=complex)
        return cls(r=d["r"], points=pts, truncation=d["truncation"], overlap_bound=d.get("overlap_bound", 0))


# ------------------------------------------------------------ candidate grids


def _arc_angle(rho: float, step: float) -> float:
    """Largest angle phi with beta(rho, rho e^{i phi}) <= step (n = 1)."""
    if rho <= 0:
        return 2 * math.pi
    T2 = math.tanh(step) ** 2
    r2 = rho * rho
    c = (2 * r2 - T2 * (1 + r2 * r2)) / (2 * r2 * (1 - T2))
    return math.acos(max(-1.0, min(1.0, c)))


def _shell_radii(s_max: float, step: float) -> np.ndarray:
    k = int(math.ceil(s_max / step))
    s = np.linspace(0.0, s_max, k + 1)
    return np.tanh(s)


def _candidates_disk(s_max: float, step: float):
    shells = []
    for rho in _shell_radii(s_max, step):
        if rho == 0.0:
            shells.append(np.zeros((1, 1), dtype=complex))
            continue
        m = max(1, int(math.ceil(2 * math.pi / _arc_angle(rho, step))))
        # stagger alternate shells to avoid aligned rays
        off = 0.5 * (len(shells) % 2)
        t = 2 * math.pi * (np.arange(m) + off) / m
        shells.append((rho * np.exp(1j * t))[:, None])
    return shells


def _candidates_ball2(s_max: float, step: float):
    """Shell grid on B_2 with metric-adapted steps.

    On the sphere of radius rho use zeta = (cos chi e^{i(psi - sin^2 chi w)}, sin chi e^{i(psi + cos^2 chi w)}):
    psi moves along i*zeta (length rho dpsi / (1 - rho^2)), chi and w are complex-tangential
    (lengths rho dchi / sqrt(1 - rho^2) and rho sin chi cos chi dw / sqrt(1 - rho^2)).
    """
    shells = []
    for rho in _shell_radii(s_max, step):
        if rho == 0.0:
            shells.append(np.zeros((1, 2), dtype=complex))
            continue
        q = 1.0 - rho * rho
        dpsi = step * q / rho
        dchi = step * math.sqrt(q) / rho
        npsi = max(1, int(math.ceil(2 * math.pi / min(dpsi, 2 * math.pi))))
        nchi = max(1, int(math.ceil((math.pi / 2) / min(dchi, math.pi / 2))))
        pts = []
        for i in range(nchi + 1):
            chi = (math.pi / 2) * i / nchi
            sc = math.sin(chi) * math.cos(chi)
            nw = 1 if sc * rho < 1e-12 else max(1, int(math.ceil(2 * math.pi * sc * rho / (step * math.sqrt(q)))))
            psi = 2 * math.pi * np.arange(npsi) / npsi
            w = 2 * math.pi * np.arange(nw) / nw
            P, Wg = np.meshgrid(psi, w, indexing="ij")
            z1 = math.cos(chi) * np.exp(1j * (P - math.sin(chi) ** 2 * Wg))
            z2 = math.sin(chi) * np.exp(1j * (P + math.cos(chi) ** 2 * Wg))
            pts.append(rho * np.stack([z1.ravel(), z2.ravel()], axis=-1))
        shells.append(np.concatenate(pts))
    return shells


def _candidate_radius(r: float, n: int) -> float:
    # B_2 shells are large; the coarser grid still leaves separation r - h >= r/2
    return r / 4.0 if n == 1 else 0.45 * r


def _grid_step(r: float, n: int) -> float:
    # cube-like cells of side L have covering radius ~ L sqrt(2n)/2; keep it below h
    return 0.9 * 2.0 * _candidate_radius(r, n) / math.sqrt(2 * n)


# ------------------------------------------------------------ greedy sweep


def _greedy(shells, tau: float, r_hint: float):
    accepted: list[np.ndarray] = []
    tree = None
    tree_pts = None
    for cand in shells:
        cnorm = np.sqrt(norm2(cand))
        rad = euclidean_radius_bound(float(cnorm.min()), tau) + 1e-12
        keep = np.ones(len(cand), dtype=bool)
        if tree is not None:
            hits = tree.query_ball_point(to_real(cand), rad)
            for i, h in enumerate(hits):
                if h:
                    if np.any(bergman_dist(cand[i], tree_pts[h], check=False) < tau):
                        keep[i] = False
        cand = cand[keep]
        if len(cand) == 0:
            continue
        # conflicts inside the shell, resolved sequentially in sweep order
        local = cKDTree(to_real(cand))
        nbrs = local.query_ball_point(to_real(cand), rad)
        alive = np.ones(len(cand), dtype=bool)
        taken = []
        for i in range(len(cand)):
            if not alive[i]:
                continue
            taken.append(i)
            others = [j for j in nbrs[i] if j > i and alive[j]]
            if others:
                close = bergman_dist(cand[i], cand[others], check=False) < tau
                for j, c in zip(others, close):
                    if c:
                        alive[j] = False
        accepted.append(cand[taken])
        tree_pts = np.concatenate(accepted)
        tree = cKDTree(to_real(tree_pts))
    return np.concatenate(accepted) if accepted else np.zeros((0, shells[0].shape[1]), dtype=complex)


def build_lattice(r: float, n: int = 1, truncation: float = 1e-3, cfg=None, *, seed: int = 0,
                  repair_probes: int = 20000) -> Lattice:
    """Greedy r-lattice on {|z| <= 1 - truncation} of B_n (n = 1, 2).

    After the sweep, seeded probes that are not covered (possible only through
    grid discretisation) are appended greedily; this keeps the separation
    threshold and restores covering on the probe set.
    """
    if not 0 < r <= 5:
        raise ValueError("r must lie in (0, 5]")
    if not 0 < truncation < 1:
        raise ValueError("truncation must lie in (0, 1)")
    if n not in (1, 2):
        raise NotImplementedError("lattices are built for n = 1, 2")
    rmax = 1.0 - truncation
    s_max = math.atanh(rmax)
    tau = r - _candidate_radius(r, n)
    if s_max < r:
        # one ball D(0, r) already covers the truncated ball
        return Lattice(r=r, points=np.zeros((1, n), dtype=complex), truncation=truncation, separation=tau,
                       meta={"candidates": 1, "grid_step": None})
    step = _grid_step(r, n)
    shells = _candidates_disk(s_max, step) if n == 1 else _candidates_ball2(s_max, step)
    total = sum(len(s) for s in shells)
    if total > MAX_CANDIDATES:
        achieved = None
        for k in range(len(shells)):
            if sum(len(s) for s in shells[: k + 1]) > MAX_CANDIDATES:
                achieved = float(np.sqrt(norm2(shells[max(k - 1, 0)][0])))
                break
        raise LatticeBudgetError(
            f"{total} candidates exceed the budget of {MAX_CANDIDATES}; reachable radius {achieved:.6f}", achieved)
    pts = _greedy(shells, tau, r)
    lat = Lattice(r=r, points=pts, truncation=truncation, separation=tau,
                  meta={"candidates": total, "grid_step": step})
    if repair_probes:
        probes = sample_truncated_ball(repair_probes, n, rmax, seed=seed + 7919)
        miss = probes[~_covered(lat.points, probes, r)]
        if len(miss):
            added = []
            cur = lat.points
            for p in miss[np.argsort(norm2(miss))]:
                if np.all(bergman_dist(p, cur, check=False) >= r):
                    cur = np.concatenate([cur, p[None, :]])
                    added.append(p)
            lat.points = cur
            lat.meta["repaired"] = len(added)
    return lat


# ------------------------------------------------------------ verification


def sample_truncated_ball(count: int, n: int, rmax: float, seed: int = 0) -> np.ndarray:
    """Uniform (Lebesgue) samples of {|z| <= rmax} in C^n."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = rmax * rng.random(count) ** (1.0 / (2 * n))
    return (g[:, 0::2] + 1j * g[:, 1::2]) * rad[:, None]


def _count_within(points: np.ndarray, probes: np.ndarray, radius: float, stop_at_one: bool = False):
    counts = np.zeros(len(probes), dtype=int)
    if len(points) == 0:
        return counts
    tree = cKDTree(to_real(points))
    pn = np.sqrt(norm2(probes))
    bound = np.array([euclidean_radius_bound(float(x), radius) for x in pn]) + 1e-12
    for i, p in enumerate(probes):
        idx = tree.query_ball_point(to_real(p), bound[i])
        if idx:
            d = bergman_dist(p, points[idx], check=False)
            counts[i] = int(np.count_nonzero(d < radius))
    return counts


def _covered(points, probes, r):
    return _count_within(points, probes, r) > 0


def verify_lattice(lat: Lattice, probes: int = 10_000, seed: int = 0) -> dict:
    """Exhaustive separation check plus seeded covering/overlap estimates."""
    if probes < 1:
        raise ValueError("probes must be >= 1")
    pts = lat.points
    n = pts.shape[1]
    min_sep = math.inf
    if len(pts) > 1:
        tree = cKDTree(to_real(pts))
        pn = np.sqrt(norm2(pts))
        for i, p in enumerate(pts):
            rad = euclidean_radius_bound(float(pn[i]), lat.r / 2.0) + 1e-12
            idx = [j for j in tree.query_ball_point(to_real(p), rad) if j != i]
            if idx:
                min_sep = min(min_sep, float(np.min(bergman_dist(p, pts[idx], check=False))))
    sep_ok = bool(min_sep >= lat.r / 2.0)
    rmax = 1.0 - lat.truncation
    probe_pts = sample_truncated_ball(probes, n, rmax, seed=seed)
    cover = _count_within(pts, probe_pts, lat.r)
    overlap = _count_within(pts, probe_pts, 4.0 * lat.r)
    return {
        "separation_ok": sep_ok,
        "min_separation": min_sep if math.isfinite(min_sep) else None,
        "covering_misses": int(np.count_nonzero(cover == 0)),
        "max_overlap": int(overlap.max()) if len(overlap) else 0,
        "points": int(len(pts)),
        "probes": int(probes),
    }


def packing_overlap_bound(n: int, r: float, separation: float) -> float:
    """Volume bound on how many separated points lie in one D(z, 4r).

    Points at mutual distance >= sep have disjoint D(a, sep/2); those within 4r
    of z have their balls inside D(z, 4r + sep/2). The invariant volume of
    D(0, s) is int_0^{tanh^2 s} n u^{n-1} (1 - u)^{-n-1} du.
    """
    from scipy.integrate import quad

    def vol(s):
        R2 = math.tanh(s) ** 2
        return quad(lambda u: n * u ** (n - 1) * (1 - u) ** (-n - 1), 0.0, R2, limit=200)[0]

    return vol(4 * r + separation / 2) / vol(separation / 2)
