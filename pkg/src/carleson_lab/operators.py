"""Toeplitz operators T_mu^beta and the ray operators J_g, I_g, M_g.

T_mu^beta f(z) = int f(w) (1 - <z, w>)^{-(n+1+beta)} dmu(w). Atomic parts are
exact finite sums. On radial parts (1 - |w|^2)^theta dv, kernels and monomials
have closed-form images through the Taylor coefficients of the kernel; other
combinations fall back to tensor quadrature on the measure.

J_g f(z) = int_0^1 f(tz) Rg(tz) dt / t and I_g f(z) = int_0^1 Rf(tz) g(tz) dt / t
are evaluated by Gauss-Legendre on the ray; their radial derivatives f Rg and
g Rf are exact, so every F(p, q, s) computation avoids the ray integral.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .carleson import (REPORT_VERSION, CarlesonParams, _atom_points, _rays_for, carleson_norm, kernel_norm_exact,
                       vanishing_probe)
from .geometry import inner, norm2
from .lattice import Lattice, build_lattice
from .measures import Atomic, Measure, Sum, WeightedDensity
from .parallel import pmap
from .quadrature import DEFAULT, QuadConfig, ball_rule, integrate_ball, normalizing_constant
from .spaces import (AnalyticFn, bloch_norm, fpqs_integral, fpqs_norm, kernel_combination, kernel_test_function,
                     little_bloch_probe, sphere_directions)
from .trends import TrendReport, boundedness_verdict, dyadic_radii, vanishing_verdict

OPERATOR_BRACKET = 100.0


class HypothesisError(ValueError):
    """Parameters outside the range where an operator characterization applies."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class RayQuadratureWarning(UserWarning):
    """Two resolutions of a ray integral disagree."""


# ------------------------------------------------------------------ Toeplitz


@dataclass(frozen=True)
class ToeplitzSpec:
    """T_mu^beta viewed as a map A^{p1}_{alpha1} -> A^{p2}_{alpha2} on B_n."""

    mu: Measure
    beta: float
    p1: float = 2.0
    alpha1: float = 0.0
    p2: float = 2.0
    alpha2: float = 0.0
    n: int = 1

    def __post_init__(self):
        if not self.beta > -1:
            raise ValueError(f"beta = {self.beta} must exceed -1")
        if not (self.p1 > 0 and self.p2 > 0):
            raise ValueError("p1 and p2 must be positive")
        if not (self.alpha1 > -1 and self.alpha2 > -1):
            raise ValueError("alpha1 and alpha2 must exceed -1")

    @property
    def sigma(self) -> float:
        return self.n + 1 + self.beta

    @property
    def lam(self) -> float:
        return 1.0 + 1.0 / self.p1 - 1.0 / self.p2

    @property
    def gamma(self) -> float:
        return (self.beta + self.alpha1 / self.p1 - self.alpha2 / self.p2) / self.lam

    def hypothesis_violations(self) -> list[str]:
        out = []
        for i, (p, a) in enumerate(((self.p1, self.alpha1), (self.p2, self.alpha2)), start=1):
            rhs = self.n * max(1.0, 1.0 / p) + (1.0 + a) / p
            if not self.sigma > rhs:
                out.append(f"n+1+beta = {self.sigma:g} must exceed n*max(1, 1/p{i}) + (1+alpha{i})/p{i} = {rhs:g}")
        if not self.lam > 0:
            out.append(f"lambda = 1 + 1/p1 - 1/p2 = {self.lam:g} must be positive")
        elif not self.gamma > -1:
            out.append(f"gamma = {self.gamma:g} must exceed -1")
        return out

    def check(self) -> None:
        bad = self.hypothesis_violations()
        if bad:
            raise HypothesisError(bad)

    def params(self) -> CarlesonParams:
        self.check()
        return CarlesonParams(self.lam, self.gamma, self.n)

    def scaled(self, c: float) -> "ToeplitzSpec":
        return ToeplitzSpec(self.mu.scale(c), self.beta, self.p1, self.alpha1, self.p2, self.alpha2, self.n)

    def to_dict(self) -> dict:
        return {"mu": self.mu.to_dict(), "beta": self.beta, "p1": self.p1, "alpha1": self.alpha1,
                "p2": self.p2, "alpha2": self.alpha2, "n": self.n,
                "lambda": self.lam, "gamma": self.gamma if self.lam > 0 else None}


def _parts(mu: Measure) -> list[Measure]:
    if isinstance(mu, Sum):
        return [q for p in mu.parts for q in _parts(p)]
    return [] if mu.is_zero() else [mu]


def _pairs(xs):
    return np.array([complex(x[0], x[1]) for x in xs])


def _kernel_terms(f: AnalyticFn):
    """(points, coeffs, sigma) when f is a finite combination of kernels (1 - <z, a>)^{-sigma}."""
    d = f.descriptor
    fam = d.get("family")
    if fam == "kernel":
        return _pairs(d["a"])[None, :], np.array([d["scale"]], dtype=complex), d["sigma"]
    if fam == "kernel_combination" and "points" in d:
        pts = np.array([_pairs(p) for p in d["points"]])
        return pts, _pairs(d["coeffs"]), d["sigma"]
    return None


def _radial_image(part: WeightedDensity, f: AnalyticFn, sigma: float, n: int):
    """Closed-form T f on a radial density part, or None when f has no closed form."""
    d = f.descriptor
    fam = d.get("family")
    theta = part.theta
    if fam in ("constant", "monomial"):
        k = 0 if fam == "constant" else int(d["k"])
        c = complex(*d["c"]) if fam == "constant" else 1.0
        mk = float(part.radial_moments(np.array([k]), n)[0])
        # (sigma)_k (n-1)! / (n-1+k)! M_k
        tau = math.exp(special.gammaln(sigma + k) - special.gammaln(sigma) + special.gammaln(n)
                       - special.gammaln(n + k)) * mk
        return lambda z: c * tau * np.asarray(z)[:, 0].astype(complex) ** k
    terms = _kernel_terms(f)
    if terms is None:
        return None
    pts, coeffs, s = terms
    mass = part.coef / normalizing_constant(n, theta)
    c = n + 1 + theta

    def image(z):
        x = np.asarray(z, dtype=complex) @ pts.conj().T
        return mass * (special.hyp2f1(s, sigma, c, x) @ coeffs)

    return image


def _density_nodes(part: WeightedDensity, n: int, cfg: QuadConfig, foci):
    pts, w, _ = ball_rule(n, part.theta, cfg, foci=foci or None)
    from .measures import BUILTIN_DENSITIES
    w = w * part.coef / normalizing_constant(n, part.theta) * BUILTIN_DENSITIES[part.h](pts)
    return pts, w


def toeplitz_image(spec: ToeplitzSpec, f: AnalyticFn, cfg: QuadConfig = DEFAULT):
    """Vectorised evaluator z -> T_mu^beta f(z) for (N, n) arrays."""
    n, sigma = spec.n, spec.sigma
    pieces = []
    for part in _parts(spec.mu):
        if isinstance(part, Atomic):
            pts, m = part.points, part.masses
            fw = f.value(pts) * m
            pieces.append(lambda z, pts=pts, fw=fw: ((1.0 - np.asarray(z, dtype=complex) @ pts.conj().T) ** -sigma) @ fw)
            continue
        img = _radial_image(part, f, sigma, n) if isinstance(part, WeightedDensity) and part.is_radial else None
        if img is None:
            pts, w = _density_nodes(part, n, cfg, list(f.foci))
            fw = f.value(pts) * w

            def img(z, pts=pts, fw=fw):
                z = np.asarray(z, dtype=complex)
                out = np.empty(len(z), dtype=complex)
                step = max(1, (1 << 22) // max(1, len(pts)))
                for s in range(0, len(z), step):
                    out[s:s + step] = ((1.0 - z[s:s + step] @ pts.conj().T) ** -sigma) @ fw
                return out
        pieces.append(img)

    def evaluate(z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = np.zeros(len(z), dtype=complex)
        for p in pieces:
            out = out + p(z)
        return out

    return evaluate


def toeplitz_apply(spec: ToeplitzSpec, f: AnalyticFn, z, cfg: QuadConfig = DEFAULT):
    """T_mu^beta f at one point (complex) or at the rows of an (N, n) array."""
    z = np.asarray(z, dtype=complex)
    val = toeplitz_image(spec, f, cfg)(np.atleast_2d(z))
    return complex(val[0]) if z.ndim == 1 else val


def _image_foci(spec: ToeplitzSpec, f: AnalyticFn, limit: int = 8) -> list:
    if f.descriptor.get("family") == "kernel_combination":
        # combination centres stay well inside the ball; the plain rule resolves them
        return list(_atom_points(spec.mu, spec.n))[:limit]
    foci = list(f.foci)[:limit]
    foci += list(_atom_points(spec.mu, spec.n))[: max(0, limit - len(foci))]
    return foci


def _atomic_gram_norm(spec: ToeplitzSpec, f: AnalyticFn, parts) -> float:
    """Exact A^2_alpha norm of T f = sum_j m_j f(w_j) K(., w_j) for purely atomic mu.

    int (1 - <z, u>)^{-s} conj((1 - <z, v>)^{-s}) dv_alpha(z) = 2F1(s, s; n+1+alpha; <v, u>).
    """
    pts = np.vstack([p.points for p in parts])
    c = np.concatenate([f.value(p.points) * p.masses for p in parts])
    # G[j, l] = <K_{w_l}, K_{w_j}> = 2F1(s, s; n+1+alpha; <w_j, w_l>)
    G = special.hyp2f1(spec.sigma, spec.sigma, spec.n + 1 + spec.alpha2, pts @ pts.conj().T)
    val = float(np.real(c.conj() @ G @ c))
    return math.sqrt(max(val, 0.0))


def _image_norm(spec: ToeplitzSpec, f: AnalyticFn, cfg: QuadConfig) -> float:
    parts = _parts(spec.mu)
    if spec.p2 == 2.0 and parts and all(isinstance(p, Atomic) for p in parts):
        return _atomic_gram_norm(spec, f, parts)
    img = toeplitz_image(spec, f, cfg)
    val = integrate_ball(lambda z: np.abs(img(z)) ** spec.p2, spec.alpha2, cfg, n=spec.n,
                         foci=_image_foci(spec, f) or None)
    return float(val) ** (1.0 / spec.p2)


def _fn_norm(f: AnalyticFn, p: float, alpha: float, n: int, cfg: QuadConfig) -> float:
    terms = _kernel_terms(f)
    if terms is not None and len(terms[1]) == 1:
        pts, c, s = terms
        return abs(c[0]) * kernel_norm_exact(pts[0], s, p, alpha)
    foci = [] if f.descriptor.get("family") == "kernel_combination" else list(f.foci)[:8]
    val = integrate_ball(lambda z: np.abs(f.value(z)) ** p, alpha, cfg, n=n, foci=foci or None)
    return float(val) ** (1.0 / p)


def extremal_kernel(spec: ToeplitzSpec, a) -> AnalyticFn:
    """(1 - |a|^2)^{sigma - (n+1+alpha1)/p1} (1 - <z, a>)^{-sigma} with sigma = n+1+beta."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    e = spec.sigma - (spec.n + 1 + spec.alpha1) / spec.p1
    return kernel_test_function(a, spec.sigma, (1.0 - float(norm2(a))) ** e)


def _probe_points(spec: ToeplitzSpec, J: int) -> tuple[np.ndarray, np.ndarray]:
    radii = dyadic_radii(J)
    rays = _rays_for(spec.mu, spec.n)
    return radii, radii[:, None, None] * rays[None, :, :]


@dataclass
class NormEstimate:
    value: float
    maximizer: dict
    trials: int
    seed: int
    kernel_probes: int

    def to_dict(self) -> dict:
        return {"value": self.value, "maximizer": self.maximizer, "trials": self.trials, "seed": self.seed,
                "kernel_probes": self.kernel_probes}


def _ratio(spec, f, cfg):
    den = _fn_norm(f, spec.p1, spec.alpha1, spec.n, cfg)
    if not den > 1e-300 or not math.isfinite(den):
        return None
    return _image_norm(spec, f, cfg) / den


def _summary(f: AnalyticFn) -> dict:
    d = dict(f.descriptor)
    d.pop("points", None)
    d.pop("coeffs", None)
    return d


def toeplitz_norm_estimate(spec: ToeplitzSpec, lat: Lattice | None = None, trials: int = 64, seed: int = 0,
                           cfg: QuadConfig = DEFAULT, *, J: int = 8) -> NormEstimate:
    """Lower bound sup ||T f||_{p2, alpha2} / ||f||_{p1, alpha1} over a finite family.

    The family holds the normalized kernels at dyadic probes along the probe rays
    and ``trials`` combinations sum_k eps_k f_{a_k} over lattice points a_k with
    seeded random signs eps_k. Functions of (numerically) zero norm are skipped.
    Combinations are integrated on ``cfg.scaled(0.5)``.
    """
    spec.check()
    n = spec.n
    if spec.mu.is_zero():
        return NormEstimate(0.0, {}, trials, seed, 0)
    _, probes = _probe_points(spec, J)
    probes = np.vstack([np.zeros((1, n), dtype=complex), probes.reshape(-1, n)])
    singles = [extremal_kernel(spec, a) for a in probes]
    combos = []
    if trials > 0:
        lat = lat if lat is not None else _combo_lattice(n)
        pts = lat.points
        e = spec.sigma - (n + 1 + spec.alpha1) / spec.p1
        scale = (1.0 - norm2(pts)) ** e
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            eps = rng.choice([-1.0, 1.0], size=len(pts))
            combos.append(kernel_combination(pts, spec.sigma, eps * scale))
    fams = singles + combos
    # combination centres sit at |a| <= 0.9; half the nodes resolve them to ~1e-5
    coarse = cfg.scaled(0.5)
    vals = pmap(lambda f: _ratio(spec, f, cfg if f.descriptor.get("family") == "kernel" else coarse), fams)
    best, arg = 0.0, {}
    for f, v in zip(fams, vals):
        if v is not None and v > best:
            best, arg = float(v), _summary(f)
    return NormEstimate(best, arg, trials, seed, len(singles))


_COMBO_LATTICES: dict = {}


def _combo_lattice(n: int) -> Lattice:
    # a coarse lattice keeps each random combination cheap to integrate
    if n not in _COMBO_LATTICES:
        _COMBO_LATTICES[n] = build_lattice(1.0, n, 0.1 if n == 1 else 0.2)
    return _COMBO_LATTICES[n]


def toeplitz_kernel_trend(spec: ToeplitzSpec, J: int = 10, cfg: QuadConfig = DEFAULT):
    """max over probe rays of ||T f_a||_{p2, alpha2} for the extremal kernels f_a at |a| = 1 - 2^{-j}.

    Returns (radii, image norms, ratios to ||f_a||_{p1, alpha1}).
    """
    radii, pts = _probe_points(spec, J)
    flat = pts.reshape(-1, spec.n)

    def one(a):
        f = extremal_kernel(spec, a)
        num = _image_norm(spec, f, cfg)
        return num, num / _fn_norm(f, spec.p1, spec.alpha1, spec.n, cfg)

    res = pmap(one, flat)
    nums = np.array([r[0] for r in res]).reshape(pts.shape[:2]).max(axis=1)
    rats = np.array([r[1] for r in res]).reshape(pts.shape[:2]).max(axis=1)
    return radii, nums, rats


def toeplitz_equivalence_check(spec: ToeplitzSpec, cfg: QuadConfig = DEFAULT, *, J: int = 10, trials: int = 16,
                               seed: int = 0, bracket: float = OPERATOR_BRACKET) -> dict:
    """Operator side against the Carleson side for one measure.

    The operator verdict comes from the trend of ||T f_a|| / ||f_a|| along dyadic
    probes; the Carleson verdict from :func:`carleson_norm`. Consistent iff the
    verdicts match and, for bounded operators, the norm ratio lies in the bracket.
    """
    params = spec.params()
    if spec.lam < 1:
        raise HypothesisError([f"lambda = {spec.lam:g} < 1: the kernel trend only detects lambda >= 1"])
    if spec.mu.is_zero():
        return {"report_version": REPORT_VERSION, "spec": spec.to_dict(), "operator_estimate": 0.0,
                "carleson_norm": 0.0, "ratio": None, "operator_verdict": "bounded",
                "carleson_verdict": "carleson", "consistent": True, "trend": None}
    radii, _, rats = toeplitz_kernel_trend(spec, J, cfg)
    trend = boundedness_verdict(radii, rats)
    cn = carleson_norm(spec.mu, params, cfg, J=12)
    est = toeplitz_norm_estimate(spec, trials=trials, seed=seed, cfg=cfg, J=min(J, 8))
    op_verdict = trend.verdict
    c_verdict = cn["verdict"]
    agree = (op_verdict == "bounded") == (c_verdict == "carleson") and c_verdict != "inconclusive"
    ratio = None
    if op_verdict == "bounded" and cn["norm"] > 0:
        value = max(est.value, float(rats.max()))
        ratio = value / cn["norm"]
        agree = agree and 1.0 / bracket <= ratio <= bracket
    return {"report_version": REPORT_VERSION, "spec": spec.to_dict(), "params": params.to_dict(),
            "operator_estimate": max(est.value, float(rats.max())), "estimate": est.to_dict(),
            "carleson_norm": cn["norm"], "ratio": ratio, "bracket": bracket,
            "operator_verdict": op_verdict, "carleson_verdict": c_verdict, "consistent": bool(agree),
            "trend": trend.to_dict()}


def toeplitz_compactness_probe(spec: ToeplitzSpec, cfg: QuadConfig = DEFAULT, *, J: int = 10, tol: float = 1e-2,
                               cross_check: bool = True) -> dict:
    """Trend of ||T f_k||_{p2, alpha2} along |a_k| = 1 - 2^{-k}; compact iff it vanishes."""
    spec.check()
    if spec.mu.is_zero():
        radii = dyadic_radii(J)
        trend = vanishing_verdict(radii, np.zeros(J), tol=tol)
    else:
        radii, nums, _ = toeplitz_kernel_trend(spec, J, cfg)
        trend = vanishing_verdict(radii, nums, tol=tol)
    verdict = "compact" if trend.verdict == "vanishing" else "not_compact"
    out = {"report_version": REPORT_VERSION, "spec": spec.to_dict(), "verdict": verdict, "trend": trend.to_dict()}
    if cross_check:
        if spec.mu.is_zero():
            vp = "vanishing"
        else:
            vp = vanishing_probe(spec.mu, spec.params(), J=12, cfg=cfg).verdict
        out["vanishing_probe"] = vp
        out["consistent"] = (vp == "vanishing") == (verdict == "compact")
    return out


# ------------------------------------------------------------------ ray operators


@dataclass(frozen=True)
class RayConfig:
    """Gauss-Legendre nodes on [0, 1]; graded panels toward t = 1 for |z| > 1 - near_boundary."""

    nodes: int = 64
    panel_nodes: int = 16
    near_boundary: float = 0.25
    rtol: float = 1e-8

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "panel_nodes": self.panel_nodes, "near_boundary": self.near_boundary,
                "rtol": self.rtol}


RAY_DEFAULT = RayConfig()


def _panel_count(depth: float, cfg: RayConfig) -> int:
    """0 for the global rule, otherwise the number of dyadic breakpoints 1 - 2^{-m} > 1 - depth/2."""
    if depth >= cfg.near_boundary:
        return 0
    m, d = 0, 0.5
    while d > depth / 2:
        m += 1
        d /= 2.0
    return m


def _ray_rule(count: int, cfg: RayConfig, refine: int = 1):
    if count == 0:
        x, w = np.polynomial.legendre.leggauss(cfg.nodes * refine)
        return 0.5 * (x + 1.0), 0.5 * w
    edges = [0.0] + [1.0 - 2.0**-m for m in range(1, count + 1)] + [1.0]
    x, w = np.polynomial.legendre.leggauss(cfg.panel_nodes * refine)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        ts.append(a + 0.5 * (b - a) * (x + 1.0))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(ts), np.concatenate(ws)


def _ray_integral(F, z: np.ndarray, cfg: RayConfig) -> np.ndarray:
    """int_0^1 F(t z) dt / t for each row of z; F(0) must vanish.

    Rows sharing a panel layout are integrated together.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    out = np.empty(len(z), dtype=complex)
    depth = 1.0 - np.sqrt(norm2(z))
    key = np.array([_panel_count(float(d), cfg) for d in depth])
    worst = 0.0
    for k in np.unique(key):
        idx = np.nonzero(key == k)[0]
        rows = z[idx]
        vals = []
        for refine in (1, 2):
            t, w = _ray_rule(int(k), cfg, refine)
            pts = (t[None, :, None] * rows[:, None, :]).reshape(-1, z.shape[1])
            vals.append((F(pts).reshape(len(idx), len(t)) / t[None, :]) @ w)
        err = np.abs(vals[1] - vals[0]) / np.maximum(1.0, np.abs(vals[1]))
        worst = max(worst, float(err.max()))
        out[idx] = vals[1]
    if worst > cfg.rtol:
        warnings.warn(f"ray quadrature unresolved: relative gap {worst:.3g} between resolutions",
                      RayQuadratureWarning)
    return out


def _vanishes_at_origin(F, n: int, name: str) -> None:
    v = complex(F(np.zeros((1, n), dtype=complex))[0])
    if abs(v) > 1e-12:
        raise ValueError(f"{name}(0) = {v} is nonzero, so the ray integrand has a 1/t singularity")


def _dim_of(*fns, n=None) -> int:
    dims = {f.n for f in fns if f.n is not None}
    if n is not None:
        dims.add(n)
    if len(dims) > 1:
        raise ValueError(f"functions live in different dimensions {sorted(dims)}")
    return dims.pop() if dims else 1


def cesaro(g: AnalyticFn, f: AnalyticFn, ray_cfg: RayConfig = RAY_DEFAULT, *, n: int | None = None) -> AnalyticFn:
    """J_g f as an AnalyticFn, with R(J_g f) = f Rg."""
    n = _dim_of(g, f, n=n)
    _vanishes_at_origin(g.rderiv, n, "Rg")

    def integrand(w):
        return f.value(w) * g.rderiv(w)

    return AnalyticFn(lambda z: _ray_integral(integrand, z, ray_cfg), lambda z: f.value(z) * g.rderiv(z),
                      {"family": "J", "g": g.descriptor, "f": _summary(f)}, tuple(f.foci) + tuple(g.foci), n)


def companion(g: AnalyticFn, f: AnalyticFn, ray_cfg: RayConfig = RAY_DEFAULT, *, n: int | None = None) -> AnalyticFn:
    """I_g f as an AnalyticFn, with R(I_g f) = g Rf."""
    n = _dim_of(g, f, n=n)
    _vanishes_at_origin(f.rderiv, n, "Rf")

    def integrand(w):
        return f.rderiv(w) * g.value(w)

    return AnalyticFn(lambda z: _ray_integral(integrand, z, ray_cfg), lambda z: g.value(z) * f.rderiv(z),
                      {"family": "I", "g": g.descriptor, "f": _summary(f)}, tuple(f.foci) + tuple(g.foci), n)


def multiplier(g: AnalyticFn, f: AnalyticFn, *, n: int | None = None) -> AnalyticFn:
    """M_g f = g f with R(M_g f) = f Rg + g Rf."""
    n = _dim_of(g, f, n=n)
    return AnalyticFn(lambda z: g.value(z) * f.value(z),
                      lambda z: f.value(z) * g.rderiv(z) + g.value(z) * f.rderiv(z),
                      {"family": "M", "g": g.descriptor, "f": _summary(f)}, tuple(f.foci) + tuple(g.foci), n)


def _pointwise(op, z):
    z = np.asarray(z, dtype=complex)
    val = op(np.atleast_2d(z))
    return complex(val[0]) if z.ndim == 1 else val


def cesaro_apply(g: AnalyticFn, f: AnalyticFn, z, ray_cfg: RayConfig = RAY_DEFAULT):
    return _pointwise(cesaro(g, f, ray_cfg), z)


def companion_apply(g: AnalyticFn, f: AnalyticFn, z, ray_cfg: RayConfig = RAY_DEFAULT):
    return _pointwise(companion(g, f, ray_cfg), z)


def multiplier_apply(g: AnalyticFn, f: AnalyticFn, z):
    return _pointwise(multiplier(g, f), z)


def operator_identities(g: AnalyticFn, f: AnalyticFn, *, n: int = 1, probes: int = 1000, seed: int = 0,
                        h: float = 1e-3, ray_cfg: RayConfig = RAY_DEFAULT, rmax: float = 0.9) -> dict:
    """Residuals of the radial-derivative identities for J_g, I_g, M_g at random points.

    R is taken by a fourth-order central difference of the ray-integrated values along t -> t z,
    so the check exercises the ray quadrature against the closed forms f Rg, g Rf
    and f Rg + g Rf. Also reports max |M_g f - J_g f - I_g f - f(0) g(0)|.
    """
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(probes, n)) + 1j * rng.normal(size=(probes, n))
    z = z / np.sqrt(norm2(z))[:, None] * (rmax * rng.uniform(0.0, 1.0, probes) ** (1.0 / (2 * n)))[:, None]
    ops = {"J": (cesaro(g, f, ray_cfg, n=n), lambda w: f.value(w) * g.rderiv(w)),
           "I": (companion(g, f, ray_cfg, n=n), lambda w: g.value(w) * f.rderiv(w)),
           "M": (multiplier(g, f, n=n), lambda w: f.value(w) * g.rderiv(w) + g.value(w) * f.rderiv(w))}
    out = {}
    vals = {}
    for k, (op, closed) in ops.items():
        vals[k] = op.value(z)
        fd = (8.0 * (op.value((1 + h) * z) - op.value((1 - h) * z))
              - (op.value((1 + 2 * h) * z) - op.value((1 - 2 * h) * z))) / (12.0 * h)
        ex = closed(z)
        out[k] = float(np.max(np.abs(fd - ex) / np.maximum(1.0, np.abs(ex))))
    origin = np.zeros((1, n), dtype=complex)
    c = complex(f.value(origin)[0] * g.value(origin)[0])
    out["constant"] = float(np.max(np.abs(vals["M"] - vals["J"] - vals["I"] - c)))
    return out


# ------------------------------------------------------------------ F(p, q, s) targets


@dataclass(frozen=True)
class FParams:
    """Target F(p, p beta - n - 1, s) with source A^t_alpha on B_n."""

    t: float
    alpha: float
    p: float
    beta: float
    s: float
    n: int = 1

    @property
    def q(self) -> float:
        return self.p * self.beta - self.n - 1

    @property
    def base(self) -> float:
        return (self.n + 1 + self.alpha) / self.t

    @property
    def kappa(self) -> float:
        """beta - (n+1+alpha)/t, the Bloch exponent of the symbol condition."""
        return self.beta - self.base

    def to_dict(self) -> dict:
        return {"t": self.t, "alpha": self.alpha, "p": self.p, "beta": self.beta, "s": self.s, "n": self.n,
                "q": self.q, "kappa": self.kappa}


def _common_violations(P: FParams) -> list[str]:
    out = []
    if not (P.p > 0 and P.t > 0):
        out.append("p and t must be positive")
    if not P.s >= 0:
        out.append(f"s = {P.s:g} must be nonnegative")
    if not P.p * P.beta + P.s > P.n:
        out.append(f"p*beta + s = {P.p * P.beta + P.s:g} must exceed n = {P.n}")
    # p/t + s/(n+1+delta) >= 1 for some delta > -1  <=>  p/t >= 1 or p/t + s/n > 1
    if not (P.p / P.t >= 1 or P.p / P.t + P.s / P.n > 1):
        out.append(f"p/t + s/(n+1+delta) >= 1 fails for every delta > -1 (p/t = {P.p / P.t:g}, s/n = {P.s / P.n:g})")
    return out


def jg_violations(P: FParams) -> list[str]:
    # same weight ranges as for I_g (alpha > -1, beta > 0)
    out = ig_violations(P)
    if not P.kappa > 0:
        out.append(f"beta - (n+1+alpha)/t = {P.kappa:g} must be positive")
    return out


def ig_violations(P: FParams) -> list[str]:
    out = _common_violations(P)
    if not P.alpha > -1:
        out.append(f"alpha = {P.alpha:g} must exceed -1")
    if not P.beta > 0:
        out.append(f"beta = {P.beta:g} must be positive")
    return out


def regime(P: FParams, tol: float = 1e-12) -> str:
    """"i" for beta > 1 + (n+1+alpha)/t, "ii" at equality, "iii" below."""
    edge = 1.0 + P.base
    if abs(P.beta - edge) <= tol * max(1.0, edge):
        return "ii"
    return "i" if P.beta > edge else "iii"


def extremal_family(P: FParams, eta: float = 1.0, J: int = 10, directions=None):
    """f_a = (1 - |a|^2)^eta (1 - <z, a>)^{-(eta + (n+1+alpha)/t)} at |a| = 1 - 2^{-j} on each direction."""
    n = P.n
    dirs = np.eye(n, dtype=complex)[:1] if directions is None else np.atleast_2d(np.asarray(directions, dtype=complex))
    radii = dyadic_radii(J)
    sigma = eta + P.base
    fams = [[kernel_test_function(r * d, sigma, (1.0 - r * r) ** eta) for d in dirs] for r in radii]
    return radii, fams, sigma


def _symbol_directions(g: AnalyticFn, n: int):
    dirs = [np.eye(n, dtype=complex)[0]]
    for p in g.foci:
        p = np.asarray(p, dtype=complex)
        if float(norm2(p)) > 0:
            dirs.append(p / math.sqrt(float(norm2(p))))
    return np.array(dirs)


def _operator_trend(make_op, g: AnalyticFn, P: FParams, cfg: QuadConfig, eta: float, J: int):
    """||Op f_a||_{F(p,q,s)} / ||f_a||_{t,alpha} along the extremal family, b in {0, a}."""
    radii, fams, sigma = extremal_family(P, eta, J, _symbol_directions(g, P.n))
    flat = [(j, f) for j, row in enumerate(fams) for f in row]

    def one(item):
        _, f = item
        a = np.asarray(f.foci[0])
        op = make_op(f)
        lhs = max(fpqs_integral(op, P.p, P.q, P.s, b, cfg, n=P.n) for b in (np.zeros(P.n, dtype=complex), a))
        return lhs ** (1.0 / P.p) / (f.descriptor["scale"] * kernel_norm_exact(a, sigma, P.t, P.alpha))

    vals = pmap(one, flat)
    out = np.zeros(len(radii))
    for (j, _), v in zip(flat, vals):
        out[j] = max(out[j], v)
    return radii, out


def _shell_sup(F, weight_exp: float, n: int, J: int, extra=(), directions: int = 256):
    dirs = sphere_directions(n, directions)
    if len(extra):
        dirs = np.vstack([dirs, np.atleast_2d(extra)])
    radii = dyadic_radii(J)
    z = radii[:, None, None] * dirs[None, :, :]
    vals = np.abs(F(z.reshape(-1, n))).reshape(len(radii), len(dirs)).max(axis=1)
    return radii, vals * (1.0 - radii**2) ** weight_exp


def _is_zero_fn(g: AnalyticFn, n: int, J: int = 12) -> bool:
    radii, vals = _shell_sup(g.value, 0.0, n, J, _symbol_directions(g, n))
    return bool(np.max(vals) <= 1e-14 and abs(g.value(np.zeros((1, n), dtype=complex))[0]) <= 1e-14)


def _verdict_pair(op_trend: TrendReport, sym_bounded: bool) -> tuple[str, str, bool]:
    op = op_trend.verdict
    sym = "bounded" if sym_bounded else "unbounded"
    return op, sym, op == sym


def _fparams(t_exp, alpha, p, beta_exp, s, n) -> FParams:
    return FParams(float(t_exp), float(alpha), float(p), float(beta_exp), float(s), int(n))


def jg_boundedness_check(g: AnalyticFn, t_exp: float, alpha: float, p: float, beta_exp: float, s: float,
                         cfg: QuadConfig = DEFAULT, *, n: int = 1, eta: float = 1.0, J: int = 10) -> dict:
    """J_g: A^t_alpha -> F(p, p beta - n - 1, s) against g in B^{beta - (n+1+alpha)/t}.

    Boundedness and compactness verdicts of the operator side come from the trend
    of the ratio along the extremal family; the symbol side from the shell maxima
    of |Rg| (1 - |z|^2)^kappa (bounded) and the little-Bloch probe (compact).
    """
    P = _fparams(t_exp, alpha, p, beta_exp, s, n)
    bad = jg_violations(P)
    if bad:
        raise HypothesisError(bad)
    radii, vals = _operator_trend(lambda f: cesaro(g, f, n=n), g, P, cfg, eta, J)
    op_b = boundedness_verdict(radii, vals)
    op_c = vanishing_verdict(radii, vals)
    rs, sv = _shell_sup(g.rderiv, P.kappa, n, 12, _symbol_directions(g, n))
    sym_b = boundedness_verdict(rs, sv)
    sym_c = little_bloch_probe(g, P.kappa, n=n)
    rhs = bloch_norm(g, P.kappa, n=n)
    lhs = float(vals.max())
    return {
        "report_version": REPORT_VERSION, "operator": "J", "g": g.descriptor, "params": P.to_dict(), "eta": eta,
        "lhs_estimate": lhs, "rhs": rhs, "ratio": (lhs / rhs) if rhs > 0 else None,
        "operator_verdict": op_b.verdict, "symbol_verdict": sym_b.verdict,
        "consistent": op_b.verdict == sym_b.verdict,
        "compact_operator": op_c.verdict == "vanishing", "compact_symbol": sym_c.verdict == "vanishing",
        "compact_consistent": (op_c.verdict == "vanishing") == (sym_c.verdict == "vanishing"),
        "operator_trend": op_b.to_dict(), "symbol_trend": sym_b.to_dict(),
    }


def _trichotomy(kind: str, g: AnalyticFn, P: FParams, cfg: QuadConfig, eta: float, J: int) -> dict:
    bad = ig_violations(P)
    if bad:
        raise HypothesisError(bad)
    n = P.n
    if kind == "I":
        make = lambda f: companion(g, f, n=n)  # noqa: E731
    else:
        make = lambda f: multiplier(g, f, n=n)  # noqa: E731
    radii, vals = _operator_trend(make, g, P, cfg, eta, J)
    op_b = boundedness_verdict(radii, vals)
    op_c = vanishing_verdict(radii, vals)
    reg = regime(P)
    zero = _is_zero_fn(g, n)
    if reg == "i":
        rs, sv = _shell_sup(g.rderiv, P.kappa, n, 12, _symbol_directions(g, n))
        sym = boundedness_verdict(rs, sv)
        sym_bounded = sym.verdict == "bounded"
        sym_compact = little_bloch_probe(g, P.kappa, n=n).verdict == "vanishing"
        condition, detail = f"g in B^{P.kappa:g}", sym.to_dict()
    elif reg == "ii":
        rs, sv = _shell_sup(g.value, 0.0, n, 12, _symbol_directions(g, n))
        sym = boundedness_verdict(rs, sv)
        sym_bounded = sym.verdict == "bounded"
        sym_compact = zero
        condition, detail = "g in H^infinity", sym.to_dict()
    else:
        sym_bounded = sym_compact = zero
        condition, detail = "g identically zero", {"zero": zero}
    op, sym_v, ok = _verdict_pair(op_b, sym_bounded)
    op_compact = op_c.verdict == "vanishing"
    return {
        "report_version": REPORT_VERSION, "operator": kind, "g": g.descriptor, "params": P.to_dict(), "eta": eta,
        "regime": reg, "condition": condition, "lhs_estimate": float(vals.max()),
        "operator_verdict": op, "symbol_verdict": sym_v, "consistent": ok,
        "compact_operator": op_compact, "compact_symbol": bool(sym_compact),
        "compact_consistent": op_compact == bool(sym_compact),
        "operator_trend": op_b.to_dict(), "symbol_detail": detail,
    }


def ig_trichotomy_check(g: AnalyticFn, t_exp: float, alpha: float, p: float, beta_exp: float, s: float,
                        cfg: QuadConfig = DEFAULT, *, n: int = 1, eta: float = 1.0, J: int = 10) -> dict:
    """I_g: A^t_alpha -> F(p, p beta - n - 1, s); the symbol condition depends on the regime of beta."""
    return _trichotomy("I", g, _fparams(t_exp, alpha, p, beta_exp, s, n), cfg, eta, J)


def mg_trichotomy_check(g: AnalyticFn, t_exp: float, alpha: float, p: float, beta_exp: float, s: float,
                        cfg: QuadConfig = DEFAULT, *, n: int = 1, eta: float = 1.0, J: int = 10) -> dict:
    """M_g: A^t_alpha -> F(p, p beta - n - 1, s); same regimes as I_g."""
    return _trichotomy("M", g, _fparams(t_exp, alpha, p, beta_exp, s, n), cfg, eta, J)


def fpqs_bloch_ratios(fns, p: float, q: float, s: float, *, n: int = 1, cfg: QuadConfig = DEFAULT) -> list[dict]:
    """||f||_{F(p,q,s)} / ||f||_{B^{(n+1+q)/p}} over a function family (seminorms, constants give 0/0)."""
    expo = (n + 1 + q) / p
    out = []
    for f in fns:
        fp = fpqs_norm(f, p, q, s, cfg=cfg, n=n)
        bl = bloch_norm(f, expo, n=n)
        out.append({"f": f.name, "fpqs": fp, "bloch": bl, "ratio": (fp / bl) if bl > 0 else None})
    return out
