"""Integration over B_n (n = 1, 2) against dv and dv_alpha.

The engine is a tensor product rule in "radial square" coordinates:

* n = 1: z = sqrt(u) e^{i theta}; dv = du dtheta / (2 pi).
* n = 2: after a unitary rotation, w_1 = sqrt(u) e^{i theta_1},
  w_2 = sqrt((1 - u) y) e^{i theta_2}; dv = (1 - u) du dy dtheta_1 dtheta_2 / (2 pi^2).

The weight (1 - |z|^2)^alpha factors as (1 - u)^alpha (1 - y)^alpha, so Gauss-Jacobi
rules absorb it exactly. Integrands with boundary peaks (kernels centred at
points a with |a| close to 1) are handled by passing ``foci``: the radial and
angular rules then become composite Gauss-Legendre rules on panels graded
geometrically towards each focus.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special
from scipy.stats import qmc

from .geometry import norm2, unitary_to_e1

CHUNK = 1 << 16


class QuadratureError(ArithmeticError):
    pass


class KernelResolutionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuadConfig:
    """Resolution knobs for every integral in the package.

    ``boundary_grading`` is the geometric ratio between consecutive graded
    panels (2 means dyadic panels); ``outer_cutoff`` is the smallest feature
    width the graded panels resolve near the sphere.
    """

    radial_nodes: int = 128
    angular_nodes: int = 256
    mc_samples: int = 1 << 16
    seed: int = 0
    boundary_grading: float = 2.0
    outer_cutoff: float = 1e-6

    def __post_init__(self):
        for name in ("radial_nodes", "angular_nodes", "mc_samples"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.boundary_grading >= 1.0:
            raise ValueError("boundary_grading must be >= 1")
        if not 0.0 < self.outer_cutoff < 1.0:
            raise ValueError("outer_cutoff must lie in (0, 1)")

    @property
    def panel_nodes(self) -> int:
        return max(8, self.radial_nodes // 8)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown QuadConfig keys: {sorted(unknown)}")
        return cls(**data)

    def scaled(self, factor: float) -> "QuadConfig":
        """Same config with node counts multiplied by ``factor``."""
        return QuadConfig(
            radial_nodes=max(1, int(round(self.radial_nodes * factor))),
            angular_nodes=max(1, int(round(self.angular_nodes * factor))),
            mc_samples=self.mc_samples,
            seed=self.seed,
            boundary_grading=self.boundary_grading,
            outer_cutoff=self.outer_cutoff,
        )


DEFAULT = QuadConfig()


@dataclass(frozen=True)
class WeightedVolume:
    alpha: float
    dim: int

    @property
    def c_alpha(self) -> float:
        return normalizing_constant(self.dim, self.alpha)


def normalizing_constant(n: int, alpha: float) -> float:
    """c_alpha with c_alpha * int (1 - |z|^2)^alpha dv = 1 on B_n.

    int_{B_n} (1 - |z|^2)^alpha dv = n B(n, alpha + 1), hence
    c_alpha = Gamma(n + alpha + 1) / (Gamma(n + 1) Gamma(alpha + 1)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    return math.exp(special.gammaln(n + alpha + 1) - special.gammaln(n + 1) - special.gammaln(alpha + 1))


# ---------------------------------------------------------------- 1-D rules


@lru_cache(maxsize=256)
def _gauss_jacobi(m: int, e: float):
    """Nodes/weights for int_0^1 g(u) (1 - u)^e du."""
    x, w = special.roots_jacobi(m, e, 0.0)
    u = (1.0 + x) / 2.0
    return u, w * 0.5 ** (e + 1.0)


@lru_cache(maxsize=64)
def _gauss_legendre(m: int):
    return np.polynomial.legendre.leggauss(m)


def _gl_panel(a: float, b: float, m: int):
    x, w = _gauss_legendre(m)
    return a + (b - a) * (x + 1.0) / 2.0, w * (b - a) / 2.0


def _radial_rule(e: float, n_nodes: int, m: int, breaks: tuple, grading: float, cutoff: float,
                 focus_radii: tuple):
    """int_0^1 g(u)(1 - u)^e du on panels; returns (u, w)."""
    pts = set(b for b in breaks if 0.0 < b < 1.0)
    g = max(grading, 1.5)
    for rho in focus_radii:
        d0 = max(1.0 - rho * rho, cutoff)
        if d0 >= 0.25:
            continue
        j = -3
        while True:
            b = 1.0 - d0 * g ** j
            if b <= 0.0:
                break
            pts.add(b)
            j += 1
    if not pts:
        return _gauss_jacobi(n_nodes, e)
    edges = [0.0] + sorted(pts)
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-15:
            continue
        u, w = _gl_panel(a, b, m)
        us.append(u)
        ws.append(w * (1.0 - u) ** e)
    last = edges[-1]
    u, w = _gauss_jacobi(m, e)
    us.append(last + (1.0 - last) * u)
    ws.append(w * (1.0 - last) ** (e + 1.0))
    return np.concatenate(us), np.concatenate(ws)


def _angular_rule(n_nodes: int, m: int, grading: float, cutoff: float, focus: tuple):
    """Rule for int_{-pi}^{pi} h(theta) dtheta; focus = ((angle, width), ...)."""
    if not focus:
        t = -math.pi + 2.0 * math.pi * (np.arange(n_nodes) + 0.5) / n_nodes
        return t, np.full(n_nodes, 2.0 * math.pi / n_nodes)
    g = max(grading, 1.5)
    cuts = []
    for phi, eps in focus:
        eps = max(eps, cutoff)
        if eps >= 0.5:
            continue
        cuts.append(phi)
        d = eps
        while d < math.pi:
            cuts.append(phi + d)
            cuts.append(phi - d)
            d *= g
    if not cuts:
        return _angular_rule(n_nodes, m, grading, cutoff, ())
    c = np.sort(np.mod(np.asarray(cuts) + math.pi, 2.0 * math.pi) - math.pi)
    keep = np.concatenate([[True], np.diff(c) > 1e-15])
    c = c[keep]
    edges = np.concatenate([c, [c[0] + 2.0 * math.pi]])
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-15:
            continue
        t, w = _gl_panel(a, b, m)
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)


# ---------------------------------------------------------------- ball rules


def _focus_key(foci) -> tuple:
    if foci is None:
        return ()
    out = []
    for a in foci:
        a = np.asarray(a, dtype=complex).reshape(-1)
        out.append(tuple(complex(round(x.real, 15), round(x.imag, 15)) for x in a))
    return tuple(out)


@lru_cache(maxsize=128)
def _ball_rule_cached(n: int, alpha: float, cfg: QuadConfig, foci: tuple, zonal: bool, breaks: tuple):
    c_alpha = normalizing_constant(n, alpha)
    m = cfg.panel_nodes
    grading, cutoff = cfg.boundary_grading, cfg.outer_cutoff
    if n == 1:
        radii = tuple(abs(f[0]) for f in foci)
        angles = tuple((math.atan2(f[0].imag, f[0].real), 1.0 - abs(f[0])) for f in foci)
        u, wu = _radial_rule(alpha, cfg.radial_nodes, m, breaks, grading, cutoff, radii)
        t, wt = _angular_rule(cfg.angular_nodes, m, grading, cutoff, angles)
        r = np.sqrt(u)
        pts = (r[:, None] * np.exp(1j * t)[None, :]).reshape(-1, 1)
        w = (wu[:, None] * wt[None, :]).reshape(-1) * c_alpha / (2.0 * math.pi)
        return pts, w, np.repeat(u, t.size)
    if n == 2:
        rot = np.eye(2, dtype=complex)
        if foci:
            a = np.asarray(foci[0], dtype=complex)
            rot = unitary_to_e1(a)
            rho = float(np.sqrt(norm2(a)))
            radii, angles = (rho,), ((0.0, 1.0 - rho),)
        else:
            radii, angles = (), ()
        nr = max(4, cfg.radial_nodes // 2)
        ny = max(4, cfg.radial_nodes // 8)
        n1 = max(4, cfg.angular_nodes // 4)
        n2 = 1 if zonal else max(4, cfg.angular_nodes // 8)
        # breakpoints in |z|^2 become u-breaks only approximately; keep them on u
        u, wu = _radial_rule(1.0 + alpha, nr, m, breaks, grading, cutoff, radii)
        y, wy = _gauss_jacobi(ny, alpha)
        t1, wt1 = _angular_rule(n1, m, grading, cutoff, angles)
        t2, wt2 = _angular_rule(n2, m, grading, cutoff, ())
        U, Y, T1, T2 = np.meshgrid(u, y, t1, t2, indexing="ij")
        W = (wu[:, None, None, None] * wy[None, :, None, None] * wt1[None, None, :, None]
             * wt2[None, None, None, :])
        w1 = np.sqrt(U) * np.exp(1j * T1)
        w2 = np.sqrt((1.0 - U) * Y) * np.exp(1j * T2)
        wpts = np.stack([w1.reshape(-1), w2.reshape(-1)], axis=-1)
        pts = wpts @ rot.conj()  # z = U^H w, i.e. z_j = sum_k conj(U_kj) w_k
        sq = (U + (1.0 - U) * Y).reshape(-1)
        return pts, W.reshape(-1) * c_alpha / (2.0 * math.pi**2), sq
    raise NotImplementedError("tensor rules exist for n = 1, 2; use integrate_qmc for larger n")


def ball_rule(n: int, alpha: float = 0.0, cfg: QuadConfig = DEFAULT, foci=None, zonal: bool = False,
              breaks: Sequence[float] = ()):
    """Nodes and weights approximating dv_alpha on B_n.

    Returns (points (N, n) complex, weights (N,), |points|^2). ``breaks`` are extra
    radial breakpoints in u = |z|^2 (n = 1) or in the first rotated coordinate
    (n = 2).
    """
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    key = _focus_key(foci)
    if n == 2 and len(key) > 1:
        key = key[:1]
    for f in key:
        rho = math.sqrt(sum(abs(c) ** 2 for c in f))
        if 1.0 - rho * rho < cfg.outer_cutoff:
            warnings.warn(f"kernel focus at |a| = {rho:.6f} may be under-resolved", KernelResolutionWarning)
    return _ball_rule_cached(n, float(alpha), cfg, key, bool(zonal), tuple(float(b) for b in breaks))


def _evaluate(f: Callable, pts: np.ndarray, w: np.ndarray) -> complex | float:
    partials = []
    for start in range(0, len(w), CHUNK):
        block = pts[start:start + CHUNK]
        vals = np.asarray(f(block))
        if vals.shape != (block.shape[0],):
            vals = np.broadcast_to(vals, (block.shape[0],))
        bad = ~np.isfinite(vals)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise QuadratureError(f"integrand is {vals[i]} at node {block[i]} (index {start + i})")
        partials.append(np.sum(vals * w[start:start + CHUNK]))
    total = np.sum(np.asarray(partials))
    return total


def integrate_ball(f: Callable, alpha: float = 0.0, cfg: QuadConfig = DEFAULT, *, n: int = 1,
                   foci=None, zonal: bool = False):
    """int_{B_n} f dv_alpha for a vectorised evaluator f: (N, n) complex -> (N,).

    ``foci`` lists points where the integrand concentrates (kernel centres);
    ``zonal`` declares that f depends only on |z| and <z, foci[0]> (n = 2 only).
    """
    pts, w, _ = ball_rule(n, alpha, cfg, foci=foci, zonal=zonal)
    val = _evaluate(f, pts, w)
    return float(np.real(val)) if np.isrealobj(val) or abs(np.imag(val)) == 0 else complex(val)


def integrate_ball_partials(f: Callable, alpha: float, radii: Sequence[float], cfg: QuadConfig = DEFAULT,
                            *, n: int = 1, foci=None):
    """Integrals of f dv_alpha over |z| < radii[j]; also returns the full integral."""
    radii = np.asarray(radii, dtype=float)
    breaks = tuple(float(r * r) for r in radii)
    pts, w, sq = ball_rule(n, alpha, cfg, foci=foci, breaks=breaks if n == 1 else ())
    vals = np.asarray(f(pts))
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite integrand in partial integrals")
    contrib = vals * w
    partial = np.array([np.sum(contrib[sq < r * r]) for r in radii])
    return partial, float(np.sum(contrib))


def integrate_radial(F: Callable[[np.ndarray], np.ndarray], n: int, alpha: float = 0.0,
                     cfg: QuadConfig = DEFAULT, *, radii: Sequence[float] = (), focus_radii=()):
    """int_{B_n} F(|z|^2) dv_alpha, optionally with partial integrals over |z| < radii[j].

    Uses int_{B_n} F(|z|^2) dv_alpha = c_alpha n int_0^1 F(u) u^{n-1} (1 - u)^alpha du.
    """
    c_alpha = normalizing_constant(n, alpha)
    breaks = tuple(float(r * r) for r in radii)
    u, w = _radial_rule(float(alpha), cfg.radial_nodes, cfg.panel_nodes, breaks, cfg.boundary_grading,
                        cfg.outer_cutoff, tuple(float(r) for r in focus_radii))
    vals = np.asarray(F(u)) * u ** (n - 1) * w * (n * c_alpha)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite radial integrand")
    if len(breaks):
        partial = np.array([np.sum(vals[u < b]) for b in breaks])
        return partial, float(np.sum(vals))
    return float(np.sum(vals))


# ---------------------------------------------------------------- regions


def ball_volume_lebesgue(n: int) -> float:
    return math.pi**n / math.factorial(n)


def integrate_region(f: Callable, membership: Callable, box, cfg: QuadConfig = DEFAULT, *, n: int = 1,
                     replicates: int = 8):
    """Scrambled-Sobol estimate of int_{region} f dv over a box in R^{2n}.

    ``membership`` maps (N, n) complex points to booleans; points outside the
    unit ball are discarded. Returns (estimate, standard error) where the error
    is the spread of independent scramblings.
    """
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    if lo.shape != (2 * n,) or hi.shape != (2 * n,):
        raise ValueError("box must have 2n coordinates")
    vol = float(np.prod(np.maximum(hi - lo, 0.0)))
    if vol == 0.0:
        return 0.0, 0.0
    per = max(1, cfg.mc_samples // replicates)
    m = max(1, int(math.ceil(math.log2(per))))
    ests = []
    for rep in range(replicates):
        sampler = qmc.Sobol(d=2 * n, scramble=True, seed=np.random.default_rng([cfg.seed, rep]))
        x = lo + (hi - lo) * sampler.random_base2(m)
        z = x[:, 0::2] + 1j * x[:, 1::2]
        inside = norm2(z) < 1.0
        vals = np.zeros(len(z))
        if np.any(inside):
            zi = z[inside]
            mem = np.asarray(membership(zi), dtype=bool)
            if np.any(mem):
                fv = np.asarray(f(zi[mem]), dtype=float)
                sub = np.zeros(len(zi))
                sub[mem] = fv
                vals[inside] = sub
        ests.append(vol * np.mean(vals) / ball_volume_lebesgue(n))
    ests = np.asarray(ests)
    return float(np.mean(ests)), float(np.std(ests, ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0


def integrate_qmc(f: Callable, alpha: float, n: int, cfg: QuadConfig = DEFAULT) -> float:
    """Best-effort QMC rule on B_n for any n (uniform ball samples, weight applied)."""
    sampler = qmc.Sobol(d=2 * n + 1, scramble=True, seed=np.random.default_rng(cfg.seed))
    x = sampler.random_base2(int(math.ceil(math.log2(cfg.mc_samples))))
    g = special.ndtri(np.clip(x[:, : 2 * n], 1e-16, 1 - 1e-16))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = x[:, 2 * n] ** (1.0 / (2 * n))
    z = (g[:, 0::2] + 1j * g[:, 1::2]) * rad[:, None]
    weight = normalizing_constant(n, alpha) * (1.0 - rad**2) ** alpha
    return float(np.mean(np.asarray(f(z)) * weight))
