"""Carleson-measure classifiers for A^p_alpha embeddings on B_n.

Every classifier samples a quantity along dyadic radii 1 - 2^{-j} on a fixed
set of rays and turns the sample into a verdict with the rules of
:mod:`trends`. For lambda >= 1 the routes test boundedness of a supremum; for
lambda < 1 they test convergence of an l^{1/(1-lambda)} or L^{1/(1-lambda)} norm.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .geometry import norm2
from .lattice import Lattice, build_lattice
from .measures import Atomic, Measure, Sum, WeightedDensity, kernel_integral, berezin
from .parallel import pmap
from .quadrature import DEFAULT, QuadConfig, ball_rule, integrate_ball_partials, integrate_radial, normalizing_constant
from .spaces import AnalyticFn, normalized_kernel, bergman_norm, constant
from .trends import TrendReport, boundedness_verdict, cauchy_verdict, dyadic_radii, vanishing_verdict

REPORT_VERSION = 1
ROUTE_BRACKET = 100.0
# any fixed radius works for the ball route; 0.75 keeps its constant within the route
# bracket of the kernel routes across the measure battery
BALL_R = 0.75

_VERDICT = {"bounded": "carleson", "unbounded": "not_carleson", "convergent": "carleson",
            "divergent": "not_carleson", "inconclusive": "inconclusive"}


# ------------------------------------------------------------------ parameters


@dataclass(frozen=True)
class CarlesonParams:
    """lambda = sum q_i / p_i and gamma = (1/lambda) sum alpha_i q_i / p_i."""

    lam: float
    gamma: float
    n: int = 1
    tuples: tuple = ()

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.gamma > -1:
            raise ValueError(f"gamma = {self.gamma} <= -1 lies outside the weight range (need gamma > -1)")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def exponent(self) -> float:
        """(n + 1 + gamma) lambda, the power of (1 - |z|^2) in every route."""
        return (self.n + 1 + self.gamma) * self.lam

    @property
    def threshold(self) -> float:
        """theta at the Carleson boundary for mu = (1 - |z|^2)^theta dv."""
        if self.lam >= 1:
            return self.exponent - (self.n + 1)
        return self.lam * (1 + self.gamma) - 1

    @property
    def dual_exponent(self) -> float:
        return 1.0 / (1.0 - self.lam) if self.lam < 1 else math.inf

    def to_dict(self) -> dict:
        d = {"lambda": self.lam, "gamma": self.gamma, "n": self.n}
        if self.tuples:
            d["tuples"] = [list(t) for t in self.tuples]
        return d


def derive_params(tuples, n: int = 1) -> CarlesonParams:
    """Parameters from (p_i, q_i, alpha_i) tuples."""
    tuples = tuple(tuple(float(x) for x in t) for t in tuples)
    if not tuples:
        raise ValueError("need at least one (p, q, alpha) tuple")
    for p, q, a in tuples:
        if not (p > 0 and q > 0):
            raise ValueError(f"p and q must be positive, got {(p, q)}")
        if not a > -1:
            raise ValueError(f"alpha must exceed -1, got {a}")
    lam = sum(q / p for p, q, _ in tuples)
    gamma = sum(a * q / p for p, q, a in tuples) / lam
    return CarlesonParams(lam, gamma, n, tuples)


# ------------------------------------------------------------------ reports


@dataclass
class DiagnosticsReport:
    route: str
    params: CarlesonParams
    radii: np.ndarray
    values: np.ndarray
    slope: float
    verdict: str
    norm_estimate: float
    config: dict = field(default_factory=dict)
    trend: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "route": self.route,
            "params": self.params.to_dict(),
            "verdict": self.verdict,
            "norm_estimate": _num(self.norm_estimate),
            "slope": _num(self.slope),
            "radii": [float(x) for x in self.radii],
            "values": [_num(x) for x in self.values],
            "trend": self.trend,
            "config": self.config,
            "extra": self.extra,
        }

    def csv_rows(self) -> list[dict]:
        return [{"probe_id": i, "radius": float(r), "value": _num(v), "slope": _num(self.slope), "verdict": self.verdict}
                for i, (r, v) in enumerate(zip(self.radii, self.values))]


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else (x if math.isfinite(x) else ("inf" if x > 0 else "-inf"))


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["probe_id", "radius", "value", "slope", "verdict"], lineterminator="\n")
    w.writeheader()
    for rep in reports:
        for row in rep.csv_rows():
            w.writerow(row)
    return buf.getvalue()


# ------------------------------------------------------------------ probes


def probe_rays(n: int) -> np.ndarray:
    """Eight fixed unit directions (n = 1: eighth roots of unity)."""
    if n == 1:
        return np.exp(2j * np.pi * np.arange(8) / 8)[:, None]
    if n == 2:
        s = 1 / math.sqrt(2)
        c6, s6 = math.cos(math.pi / 6), math.sin(math.pi / 6)
        rays = [(1, 0), (0, 1), (s, s), (s, 1j * s), (s, -s), (c6, s6), (1j * s6, c6), (-1j, 0)]
        return np.array(rays, dtype=complex)
    raise ValueError("probe rays defined for n = 1, 2")


def _rays_for(mu: Measure, n: int) -> np.ndarray:
    # radial measures give the same value on every ray
    rays = probe_rays(n)
    return rays[:1] if mu.is_radial else rays


def _atom_points(mu: Measure, n: int) -> np.ndarray:
    if isinstance(mu, Atomic):
        return mu.points
    if isinstance(mu, Sum):
        pts = [_atom_points(p, n) for p in mu.parts]
        pts = [p for p in pts if len(p)]
        return np.concatenate(pts) if pts else np.zeros((0, n), dtype=complex)
    return np.zeros((0, n), dtype=complex)


def _cfg_echo(cfg: QuadConfig, **kw) -> dict:
    d = {"quad": cfg.to_dict()}
    d.update(kw)
    return d


def _dimension_check(mu: Measure, n: int) -> None:
    pts = _atom_points(mu, n)
    if len(pts) and pts.shape[1] != n:
        raise ValueError(f"atoms live in C^{pts.shape[1]}, parameters in C^{n}")


# ------------------------------------------------------------------ lambda >= 1 routes


def classify_ball(mu: Measure, params: CarlesonParams, r: float = BALL_R, J: int = 12, cfg: QuadConfig = DEFAULT,
                  **rule) -> DiagnosticsReport:
    """sup_z mu(D(z, r)) / (1 - |z|^2)^{(n+1+gamma) lambda} along dyadic probes."""
    n = params.n
    _dimension_check(mu, n)
    radii = dyadic_radii(J)
    rays = _rays_for(mu, n)
    centers = (radii[:, None, None] * rays[None, :, :]).reshape(-1, n)
    masses = mu.ball_masses(centers, r, cfg).reshape(len(radii), len(rays))
    vals = (masses / (1.0 - radii**2)[:, None] ** params.exponent).max(axis=1)
    extra_pts = np.vstack([np.zeros((1, n), dtype=complex), _atom_points(mu, n)])
    extra = mu.ball_masses(extra_pts, r, cfg) / (1.0 - norm2(extra_pts)) ** params.exponent
    trend = boundedness_verdict(radii, vals, **rule)
    est = float(max(vals.max(), extra.max()))
    return DiagnosticsReport("ball", params, radii, vals, trend.slope, _VERDICT[trend.verdict], est,
                             _cfg_echo(cfg, r=r, J=J), trend.to_dict())


def _kernel_probe_values(mu, params, t, J, cfg):
    n = params.n
    E = params.exponent + t
    radii = dyadic_radii(J)
    rays = _rays_for(mu, n)
    centers = (radii[:, None, None] * rays[None, :, :]).reshape(-1, n)
    raw = np.array(pmap(lambda a: kernel_integral(mu, a, E, cfg), centers)).reshape(len(radii), len(rays))
    vals = ((1.0 - radii**2)[:, None] ** t * raw).max(axis=1)
    extra_pts = np.vstack([np.zeros((1, n), dtype=complex), _atom_points(mu, n)])
    extra = np.array([(1.0 - float(norm2(a))) ** t * kernel_integral(mu, a, E, cfg) for a in extra_pts])
    return radii, vals, extra


def classify_berezin(mu: Measure, params: CarlesonParams, s: float | None = None, t: float | None = None,
                     J: int = 12, cfg: QuadConfig = DEFAULT, lat_r: float = 0.5, **rule) -> DiagnosticsReport:
    """Kernel-integral route.

    lambda >= 1: sup_a (1 - |a|^2)^t int |1 - <z, a>|^{-(n+1+gamma) lambda - t} dmu(z), with t = n+1+gamma by default.
    lambda < 1: ||B_{s,gamma}(mu)||_{L^{1/(1-lambda)}(v_gamma)}, s = n+1 by default, judged by Cauchy
    flatness of the partial norms over |z| < 1 - 2^{-j}.
    """
    n = params.n
    _dimension_check(mu, n)
    if params.lam >= 1:
        t = params.n + 1 + params.gamma if t is None else t
        if not t > 0:
            raise ValueError("t must be positive")
        radii, vals, extra = _kernel_probe_values(mu, params, t, J, cfg)
        trend = boundedness_verdict(radii, vals, **rule)
        est = float(max(vals.max(), extra.max()))
        return DiagnosticsReport("berezin", params, radii, vals, trend.slope, _VERDICT[trend.verdict], est,
                                 _cfg_echo(cfg, t=t, J=J), trend.to_dict())
    s = n + 1.0 if s is None else s
    if not s > 0:
        raise ValueError("s must be positive")
    radii = dyadic_radii(J)
    partial, total = _berezin_lp_partials(mu, params, s, radii, cfg)
    P = params.dual_exponent
    trend = cauchy_verdict(radii, partial, power=P, **rule)
    est = float(max(total, 0.0) ** (1.0 / P))
    return DiagnosticsReport("berezin", params, radii, trend.values, trend.slope, _VERDICT[trend.verdict], est,
                             _cfg_echo(cfg, s=s, J=J), trend.to_dict())


def _berezin_lp_partials(mu, params, s, radii, cfg):
    """Partial integrals of B_{s,gamma}(mu)^P dv_gamma over |z| < radii[j]."""
    n, g, P = params.n, params.gamma, params.dual_exponent
    E = n + 1 + s + g
    if mu.is_zero():
        return np.zeros(len(radii)), 0.0
    radial_part, atoms = _split(mu, n)
    if radial_part is not None and not radial_part.is_radial:
        return _berezin_lp_partials_generic(mu, params, s, radii, cfg)
    if len(atoms.masses) == 0:
        # radial transform: evaluate B on the radial nodes only
        def F(u):
            rho = np.sqrt(u)
            b = np.array(pmap(lambda x: kernel_integral(radial_part, np.array([x] + [0.0] * (n - 1), dtype=complex),
                                                         E, cfg), rho))
            return ((1.0 - u) ** s * b) ** P

        partial, total = integrate_radial(F, n, g, cfg, radii=radii)
        return partial, total

    def B(z):
        za = z @ atoms.points.conj().T
        val = (np.abs(1.0 - za) ** (-E)) @ atoms.masses
        if radial_part is not None:
            rho = np.sqrt(norm2(z))
            val = val + _radial_kernel_table(radial_part, n, E, cfg)(rho)
        return ((1.0 - norm2(z)) ** s * val) ** P

    foci = list(atoms.points) if n == 1 else list(atoms.points[:1])
    return integrate_ball_partials(B, g, radii, cfg, n=n, foci=foci)


def _split(mu: Measure, n: int):
    """(radial density part or None, atomic part) of a measure."""
    parts = mu.parts if isinstance(mu, Sum) else (mu,)
    dens = [p for p in parts if not isinstance(p, Atomic) and not p.is_zero()]
    atoms = [p for p in parts if isinstance(p, Atomic) and not p.is_zero()]
    dpart = None if not dens else (dens[0] if len(dens) == 1 else Sum(tuple(dens)))
    if atoms:
        pts = np.concatenate([a.points for a in atoms])
        ms = np.concatenate([a.masses for a in atoms])
        apart = Atomic(pts, ms)
    else:
        apart = Atomic(np.zeros((0, n), dtype=complex), np.zeros(0))
    return dpart, apart


def _radial_kernel_table(mu, n, E, cfg, size: int = 400):
    """Interpolant of rho -> int |1 - <w, rho e_1>|^{-E} dmu(w) in log(1 - rho)."""
    x = np.linspace(0.0, math.log(1e-12), size)
    rho = 1.0 - np.exp(x)
    vals = np.array([kernel_integral(mu, np.array([r] + [0.0] * (n - 1), dtype=complex), E, cfg) for r in rho])
    lv = np.log(vals)

    def f(r):
        xr = np.log(np.maximum(1.0 - np.asarray(r), 1e-12))
        return np.exp(np.interp(-xr, -x, lv))

    return f


def _berezin_lp_partials_generic(mu, params, s, radii, cfg):
    """Non-radial densities: B at the nodes of a coarse outer rule, each by quadrature."""
    n, g, P = params.n, params.gamma, params.dual_exponent
    coarse = cfg.scaled(0.25)
    pts, w, sq = ball_rule(n, g, coarse, breaks=tuple(float(r * r) for r in radii) if n == 1 else ())
    vals = np.array(pmap(lambda z: berezin(mu, s, g, z, coarse), pts))
    contrib = vals**P * w
    partial = np.array([np.sum(contrib[sq < r * r]) for r in radii])
    return partial, float(np.sum(contrib))


# ------------------------------------------------------------------ lambda < 1 route


@lru_cache(maxsize=16)
def default_lattice(r: float, n: int, truncation: float) -> Lattice:
    return build_lattice(r, n, truncation)


LATTICE_R = 0.25


def default_truncation(n: int) -> float:
    return 1e-3 if n == 1 else 3e-2


def default_lattice_for(n: int) -> Lattice:
    return default_lattice(LATTICE_R if n == 1 else 0.5, n, default_truncation(n))


def classify_lattice(mu: Measure, params: CarlesonParams, lat: Lattice | None = None, cfg: QuadConfig = DEFAULT,
                     **rule) -> DiagnosticsReport:
    """l^{1/(1-lambda)} norm of mu(D_k) / (1 - |a_k|^2)^{(n+1+gamma) lambda} over a truncated lattice.

    Partial norms are accumulated over dyadic shells 2^{-j-1} <= 1 - |a_k| < 2^{-j}; the
    verdict comes from the decay of the shell increments (:func:`trends.cauchy_verdict`).
    """
    n = params.n
    _dimension_check(mu, n)
    if not 0 < params.lam < 1:
        raise ValueError("the lattice route needs 0 < lambda < 1")
    if lat is None:
        lat = default_lattice_for(n)
    if lat.dim != n:
        raise ValueError("lattice dimension differs from the parameters")
    P = params.dual_exponent
    pn = np.sqrt(norm2(lat.points))
    seq = mu.ball_masses(lat.points, lat.r, cfg) / (1.0 - pn**2) ** params.exponent
    depth = np.floor(-np.log2(np.maximum(1.0 - pn, 1e-300))).astype(int)
    # shells within hyperbolic distance r of the truncation edge are over-populated by the
    # greedy sweep; keep only shells with 1 - |a| >= truncation * e^{2r}
    edge = lat.truncation * math.exp(2.0 * lat.r)
    jmax = int(math.floor(-math.log2(edge))) - 1
    shells = np.arange(0, max(jmax, -1) + 1)
    inside = depth <= jmax
    sums = np.array([np.sum(seq[depth == j] ** P) for j in shells])
    shell_radii = 1.0 - 2.0 ** -(shells + 1.0)
    trend = cauchy_verdict(shell_radii, np.cumsum(sums), power=P, **rule)
    est = float(np.sum(seq**P)) ** (1.0 / P)
    return DiagnosticsReport("lattice", params, shell_radii, trend.values, trend.slope, _VERDICT[trend.verdict], est,
                             _cfg_echo(cfg, lattice_r=lat.r, truncation=lat.truncation, points=len(lat)),
                             trend.to_dict(), {"sequence_max": float(seq.max()) if len(seq) else 0.0,
                                               "points_used": int(np.count_nonzero(inside)),
                                               "norm_complete_shells": float(trend.values[-1]) if len(trend.values) else 0.0})


# ------------------------------------------------------------------ norm with cross-route evidence


def kernel_norm_exact(a, sigma: float, p: float, alpha: float) -> float:
    """||(1 - <z, a>)^{-sigma}||_{p, alpha} = 2F1(p sigma/2, p sigma/2; n+1+alpha; |a|^2)^{1/p}."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = a.shape[0]
    b = p * sigma / 2.0
    return float(special.hyp2f1(b, b, n + 1 + alpha, float(norm2(a)))) ** (1.0 / p)


def _kernel_probes(n: int, J: int, mu: Measure) -> np.ndarray:
    radii = np.concatenate([[0.0], dyadic_radii(J)])
    rays = _rays_for(mu, n)
    pts = (radii[:, None, None] * rays[None, :, :]).reshape(-1, n)
    atoms = _atom_points(mu, n)
    return np.vstack([pts, atoms]) if len(atoms) else pts


def direct_lower_bound(mu: Measure, params: CarlesonParams, J: int = 12, cfg: QuadConfig = DEFAULT):
    """max over normalized kernels f of int |f|^lambda dmu / ||f||_{1,gamma}^lambda (and f = 1)."""
    n, lam, g = params.n, params.lam, params.gamma
    sigma = 2.0 * (n + 1 + g)
    best, arg = mu.total_mass(n), None
    probes = _kernel_probes(n, J, mu)

    def ratio(a):
        lhs = kernel_integral(mu, a, sigma * lam, cfg)
        return lhs / kernel_norm_exact(a, sigma, 1.0, g) ** lam

    vals = pmap(ratio, probes)
    for a, v in zip(probes, vals):
        if v > best:
            best, arg = float(v), a
    return best, arg


def carleson_norm(mu: Measure, params: CarlesonParams, cfg: QuadConfig = DEFAULT, *, r: float = BALL_R,
                  lat: Lattice | None = None, J: int = 12) -> dict:
    """Route estimates of ||mu||_{lambda, gamma} with their ratios.

    The headline value is the ball route for lambda >= 1 and the lattice route
    for lambda < 1. For Carleson verdicts, routes differing by more than 100x make
    the result inconclusive; when every route diverges the estimates are only
    truncation-dependent lower bounds and their spread is reported, not judged.
    """
    routes = {}
    if params.lam >= 1:
        routes["ball"] = classify_ball(mu, params, r, J, cfg)
        routes["berezin"] = classify_berezin(mu, params, J=J, cfg=cfg)
        head = "ball"
    else:
        routes["lattice"] = classify_lattice(mu, params, lat, cfg)
        routes["berezin"] = classify_berezin(mu, params, J=J, cfg=cfg)
        head = "lattice"
    lower, arg = direct_lower_bound(mu, params, J, cfg)
    ests = {k: v.norm_estimate for k, v in routes.items()}
    ests["direct"] = lower
    h = ests[head]
    ratios = {k: (v / h if h > 0 else (1.0 if v == 0 else math.inf)) for k, v in ests.items()}
    spread = [x for x in ratios.values() if x > 0]
    agree = all(1.0 / ROUTE_BRACKET <= x <= ROUTE_BRACKET for x in ratios.values()) if h > 0 else all(
        v == 0 for v in ests.values())
    verdicts = {k: v.verdict for k, v in routes.items()}
    vset = set(verdicts.values())
    verdict = vset.pop() if len(vset) == 1 else "inconclusive"
    if not agree and verdict == "carleson":
        verdict = "inconclusive"
    return {
        "report_version": REPORT_VERSION,
        "params": params.to_dict(),
        "norm": h,
        "headline_route": head,
        "estimates": ests,
        "ratios": ratios,
        "spread": (max(spread) / min(spread)) if spread else 1.0,
        "verdicts": verdicts,
        "verdict": verdict,
        "routes_within_bracket": agree,
        "direct_maximizer": None if arg is None else [[float(x.real), float(x.imag)] for x in arg],
        "routes": {k: v.to_dict() for k, v in routes.items()},
    }


# ------------------------------------------------------------------ vanishing


def vanishing_probe(mu: Measure, params: CarlesonParams, t: float | None = None, J: int = 12,
                    cfg: QuadConfig = DEFAULT, tol: float = 1e-2) -> TrendReport:
    """(1 - |a|^2)^t int |1 - <z, a>|^{-(n+1+gamma) lambda - t} dmu(z) as |a| -> 1.

    For lambda < 1 vanishing and plain Carleson coincide, so the verdict is
    taken from the lattice and Berezin routes.
    """
    n = params.n
    if params.lam < 1:
        a = classify_lattice(mu, params, None, cfg)
        b = classify_berezin(mu, params, J=J, cfg=cfg)
        ok = a.verdict == b.verdict == "carleson"
        rep = TrendReport(a.radii, a.values, float("nan"), "vanishing" if ok else "not_vanishing", a.norm_estimate,
                          {"kind": "delegated", "lattice": a.verdict, "berezin": b.verdict})
        return rep
    t = n + 1 + params.gamma if t is None else t
    radii, vals, _ = _kernel_probe_values(mu, params, t, J, cfg)
    return vanishing_verdict(radii, vals, tol=tol)


# ------------------------------------------------------------------ key lemma operator


def s_operator(mu: Measure, f: AnalyticFn, r_exp: float, s: float, alpha1: float, z, cfg: QuadConfig = DEFAULT) -> float:
    """(1 - |z|^2)^s int |f(w)|^{r_exp} |1 - <z, w>|^{-(n+1+s+alpha1)} dmu(w)."""
    if not s > 0 or not r_exp > 0:
        raise ValueError("s and r_exp must be positive")
    z = np.asarray(z, dtype=complex).reshape(-1)
    n = z.shape[0]
    E = n + 1 + s + alpha1

    def F(w):
        return np.abs(f.value(w)) ** r_exp * np.abs(1.0 - w @ z.conj()) ** (-E)

    foci = [z] + list(f.foci)
    val = mu.integrate(F, n, cfg, foci=foci if n == 1 else foci[:1])
    return (1.0 - float(norm2(z))) ** s * val


def _s_operator_on_nodes(mu, f, r_exp, s, alpha1, Z, cfg):
    n = Z.shape[1]
    E = n + 1 + s + alpha1
    radial_part, atoms = _split(mu, n)
    out = np.zeros(len(Z))
    if len(atoms.masses):
        fa = np.abs(f.value(atoms.points)) ** r_exp * atoms.masses
        K = np.abs(1.0 - Z @ atoms.points.conj().T) ** (-E)
        out += K @ fa
    if radial_part is not None:
        out += np.array(pmap(lambda z: s_operator(radial_part, f, r_exp, s, alpha1, z, cfg)
                             / (1.0 - float(norm2(z))) ** s, Z))
    return (1.0 - norm2(Z)) ** s * out


def key_lemma_params(p: float, q: float, r_exp: float, alpha1: float, alpha2: float, n: int = 1) -> CarlesonParams:
    """lambda = 1 + r/p - 1/q and gamma = (alpha1 + alpha2 r/p - alpha1/q) / lambda."""
    lam = 1.0 + r_exp / p - 1.0 / q
    gamma = (alpha1 + alpha2 * r_exp / p - alpha1 / q) / lam
    return CarlesonParams(lam, gamma, n)


def key_lemma_battery(n: int, p: float, alpha2: float) -> list[AnalyticFn]:
    out = [constant(1.0)]
    for rad in (0.5, 0.9, 0.99):
        a = np.zeros(n, dtype=complex)
        a[0] = rad
        out.append(normalized_kernel(a, p, alpha2))
    return out


def key_lemma_check(mu: Measure, p: float, q: float, r_exp: float, alpha1: float, alpha2: float, *, n: int = 1,
                    s: float = 1.0, fns=None, cfg: QuadConfig | None = None) -> dict:
    """K_est = max_f ||S f||_{q, alpha1} / ||f||_{p, alpha2}^r, compared with ||mu||_{lambda, gamma}."""
    if not q > 1 or not p > 0:
        raise ValueError("need q > 1 and p > 0")
    params = key_lemma_params(p, q, r_exp, alpha1, alpha2, n)
    fns = key_lemma_battery(n, p, alpha2) if fns is None else list(fns)
    if not fns:
        raise ValueError("the function battery is empty")
    cfg = DEFAULT.scaled(0.25) if cfg is None else cfg
    best, which = 0.0, None
    rows = []
    for f in fns:
        fn = bergman_norm(f, p, alpha2, DEFAULT, n=n, divergence_check=False)
        if fn == 0:
            continue
        if mu.is_zero():
            rows.append({"f": f.descriptor, "ratio": 0.0})
            continue
        pts, w, _ = ball_rule(n, alpha1, cfg, foci=list(f.foci)[:1] or None)
        Sf = _s_operator_on_nodes(mu, f, r_exp, s, alpha1, pts, cfg)
        snorm = float(np.sum(np.abs(Sf) ** q * w)) ** (1.0 / q)
        ratio = snorm / fn**r_exp
        rows.append({"f": f.descriptor, "S_norm": snorm, "f_norm": fn, "ratio": ratio})
        if ratio > best:
            best, which = ratio, f.descriptor
    norm = carleson_norm(mu, params, DEFAULT)["norm"] if not mu.is_zero() else 0.0
    return {"report_version": REPORT_VERSION, "params": params.to_dict(), "K_est": best, "maximizer": which,
            "carleson_norm": norm, "ratio": (best / norm) if norm > 0 else (0.0 if best == 0 else math.inf),
            "rows": rows}


# ------------------------------------------------------------------ product inequality


def _normalized_kernel_parts(a, p, alpha, n):
    """sigma, prefactor of f_{a} = (1-|a|^2)^{(n+1+alpha)/p} (1 - <z, a>)^{-2(n+1+alpha)/p}."""
    base = (n + 1 + alpha) / p
    return 2 * base, (1.0 - float(norm2(a))) ** base


def product_inequality_check(mu: Measure, tuples, *, n: int = 1, trials: int = 64, seed: int = 0, J: int = 12,
                             cfg: QuadConfig = DEFAULT, norm: float | None = None) -> dict:
    """C_est = max over kernel tuples of int prod |f_i|^{q_i} dmu / prod ||f_i||_{p_i, alpha_i}^{q_i}.

    Every probe point contributes the coincident tuple (all f_i centred at one
    point); ``trials`` further tuples draw independent centres with a seeded RNG.
    """
    params = derive_params(tuples, n)
    probes = _kernel_probes(n, J, mu)
    rng = np.random.default_rng(seed)
    combos = [tuple([i] * len(params.tuples)) for i in range(len(probes))]
    for _ in range(trials):
        combos.append(tuple(int(x) for x in rng.integers(0, len(probes), len(params.tuples))))

    def ratio(idx):
        centres = [probes[i] for i in idx]
        rhs = 1.0
        sig, pref = [], []
        for (p, q, al), a in zip(params.tuples, centres):
            sg, pf = _normalized_kernel_parts(a, p, al, n)
            sig.append(sg)
            pref.append(pf)
            rhs *= (pf * kernel_norm_exact(a, sg, p, al)) ** q
        if rhs == 0:
            return 0.0
        lead = float(np.prod([pf**q for pf, (_, q, _) in zip(pref, params.tuples)]))
        if len(set(idx)) == 1:
            E = sum(sg * q for sg, (_, q, _) in zip(sig, params.tuples))
            lhs = lead * kernel_integral(mu, centres[0], E, cfg)
        else:
            def F(w):
                out = np.ones(w.shape[0])
                for sg, (_, q, _), a in zip(sig, params.tuples, centres):
                    out = out * np.abs(1.0 - w @ a.conj()) ** (-sg * q)
                return out

            foci = [c for c in centres if float(norm2(c)) > 0]
            lhs = lead * mu.integrate(F, n, cfg, foci=(foci if n == 1 else foci[:1]) or None)
        return lhs / rhs

    vals = pmap(ratio, combos)
    k = int(np.argmax(vals)) if vals else 0
    c_est = float(vals[k]) if vals else 0.0
    if norm is None:
        norm = carleson_norm(mu, params, cfg, J=J)["norm"] if not mu.is_zero() else 0.0
    return {"report_version": REPORT_VERSION, "params": params.to_dict(), "C_est": c_est,
            "maximizer": [[[float(x.real), float(x.imag)] for x in probes[i]] for i in combos[k]],
            "carleson_norm": norm, "ratio": (c_est / norm) if norm > 0 else (0.0 if c_est == 0 else math.inf),
            "tuples_tested": len(combos), "seed": seed}


def sanitize(obj):
    """Replace NaN by None and infinities by strings so the JSON stays strict."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, DiagnosticsReport):
        return sanitize(obj.to_dict())
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(obj) -> str:
    """Deterministic JSON for reports (sorted keys, fixed float repr)."""
    obj = sanitize(obj)

    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, DiagnosticsReport):
            return o.to_dict()
        if isinstance(o, complex):
            return [o.real, o.imag]
        raise TypeError(f"not serialisable: {type(o)}")

    return json.dumps(obj, default=default, sort_keys=True, indent=1, allow_nan=False)
