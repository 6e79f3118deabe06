"""Holomorphic test functions with radial derivatives, and the norms used on them.

An :class:`AnalyticFn` carries a vectorised value evaluator, an exact radial
derivative Rf(z) = sum_k z_k df/dz_k, a JSON-able descriptor and a tuple of
"foci" (points near which the function peaks) that the quadrature uses to
grade its panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import check_domain, inner, norm2
from .quadrature import DEFAULT, QuadConfig, integrate_ball, normalizing_constant
from .trends import TrendReport, dyadic_radii, vanishing_verdict

BATTERY_VERSION = "default-v1"


@dataclass(frozen=True)
class AnalyticFn:
    """Holomorphic f on B_n given by evaluators for f and Rf.

    Evaluators map an (N, n) complex array to an (N,) complex array. ``n`` is
    None for families defined in every dimension (they depend on z_1 only).
    """

    value: Callable
    rderiv: Callable | None
    descriptor: dict = field(default_factory=dict)
    foci: tuple = ()
    n: int | None = None

    def __call__(self, z):
        return self.value(np.atleast_2d(np.asarray(z, dtype=complex)))

    def R(self, z):
        if self.rderiv is None:
            raise ValueError(f"no radial derivative for {self.descriptor}")
        return self.rderiv(np.atleast_2d(np.asarray(z, dtype=complex)))

    @property
    def name(self) -> str:
        d = self.descriptor
        return d.get("label") or d.get("family", "fn")

    def derivative_fn(self) -> "AnalyticFn":
        """Rf as a function in its own right (without a further derivative)."""
        return AnalyticFn(self.rderiv, None, {"family": "R", "of": self.descriptor}, self.foci, self.n)


def _z1(z):
    return np.asarray(z)[:, 0]


def constant(c: complex = 1.0) -> AnalyticFn:
    return AnalyticFn(lambda z: np.full(z.shape[0], complex(c)), lambda z: np.zeros(z.shape[0], dtype=complex),
                      {"family": "constant", "c": [float(np.real(c)), float(np.imag(c))], "label": f"{c}"})


def monomial(k: int) -> AnalyticFn:
    """z_1^k; homogeneous of degree k, so R z_1^k = k z_1^k."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    return AnalyticFn(lambda z: _z1(z).astype(complex) ** k, lambda z: k * _z1(z).astype(complex) ** k,
                      {"family": "monomial", "k": k, "label": f"z1^{k}"})


def kernel_test_function(a, sigma: float, scale: float = 1.0) -> AnalyticFn:
    """scale * (1 - <z, a>)^{-sigma}, with R f = sigma <z, a> (1 - <z, a>)^{-sigma-1} * scale."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    check_domain(a)
    if not sigma > 0:
        raise ValueError("sigma must be positive")

    def value(z):
        return scale * (1.0 - inner(z, a)) ** (-sigma)

    def rderiv(z):
        za = inner(z, a)
        return scale * sigma * za * (1.0 - za) ** (-sigma - 1.0)

    foci = (a,) if float(norm2(a)) > 0 else ()
    desc = {"family": "kernel", "a": [[float(x.real), float(x.imag)] for x in a], "sigma": float(sigma),
            "scale": float(scale), "label": f"kernel(|a|={math.sqrt(float(norm2(a))):.3g},sigma={sigma:g})"}
    return AnalyticFn(value, rderiv, desc, foci, a.shape[0])


def normalized_kernel(a, p: float, alpha: float, sigma: float | None = None) -> AnalyticFn:
    """(1 - |a|^2)^{sigma - (n+1+alpha)/p} (1 - <z, a>)^{-sigma}; sigma defaults to 2(n+1+alpha)/p.

    With sigma > (n+1+alpha)/p these have A^p_alpha norm bounded independently of a.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = a.shape[0]
    base = (n + 1 + alpha) / p
    if sigma is None:
        sigma = 2 * base
    return kernel_test_function(a, sigma, (1.0 - float(norm2(a))) ** (sigma - base))


def kernel_combination(points, sigma: float, coeffs) -> AnalyticFn:
    """sum_j c_j (1 - <z, a_j>)^{-sigma}."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    if len(c) != len(pts):
        raise ValueError("one coefficient per base point")
    check_domain(pts)

    def value(z):
        za = z @ pts.conj().T
        return ((1.0 - za) ** (-sigma)) @ c

    def rderiv(z):
        za = z @ pts.conj().T
        return (sigma * za * (1.0 - za) ** (-sigma - 1.0)) @ c

    desc = {"family": "kernel_combination", "sigma": float(sigma), "size": len(c),
            "points": [[[float(x.real), float(x.imag)] for x in p] for p in pts],
            "coeffs": [[float(x.real), float(x.imag)] for x in c]}
    return AnalyticFn(value, rderiv, desc, tuple(pts), pts.shape[1])


def boundary_power(sigma: float) -> AnalyticFn:
    """The function of z_1 with R g = z_1 (1 - z_1)^{-sigma} and g(0) = 0.

    g = ((1 - z_1)^{1-sigma} - 1) / (sigma - 1), and g = -log(1 - z_1) at sigma = 1.
    """
    sigma = float(sigma)

    if sigma == 1.0:
        def value(z):
            return -np.log(1.0 - _z1(z).astype(complex))
        label = "g_log"
    else:
        def value(z):
            return ((1.0 - _z1(z).astype(complex)) ** (1.0 - sigma) - 1.0) / (sigma - 1.0)
        label = f"boundary_power({sigma:g})"

    def rderiv(z):
        w = _z1(z).astype(complex)
        return w * (1.0 - w) ** (-sigma)

    return AnalyticFn(value, rderiv, {"family": "boundary_power", "sigma": sigma, "label": label})


def g_log() -> AnalyticFn:
    """-log(1 - z_1): in the Bloch space B^1, not in the little Bloch space."""
    return boundary_power(1.0)


def product(fns: Sequence[AnalyticFn]) -> AnalyticFn:
    """Pointwise product with the Leibniz rule for R."""
    fns = tuple(fns)

    def value(z):
        out = np.ones(z.shape[0], dtype=complex)
        for f in fns:
            out = out * f.value(z)
        return out

    def rderiv(z):
        vals = [f.value(z) for f in fns]
        out = np.zeros(z.shape[0], dtype=complex)
        for i, f in enumerate(fns):
            term = f.rderiv(z)
            for j, v in enumerate(vals):
                if j != i:
                    term = term * v
            out = out + term
        return out

    foci = tuple(p for f in fns for p in f.foci)
    dims = {f.n for f in fns if f.n is not None}
    return AnalyticFn(value, rderiv, {"family": "product", "factors": [f.descriptor for f in fns]}, foci,
                      dims.pop() if dims else None)


def battery(name: str = BATTERY_VERSION, n: int = 1) -> list[AnalyticFn]:
    """The fixed, versioned family of test functions used by property checks."""
    if name != BATTERY_VERSION:
        raise ValueError(f"unknown battery {name!r}; available: {BATTERY_VERSION!r}")
    out = [constant(1.0), monomial(1), monomial(2)]
    for rad in (0.5, 0.9, 0.99):
        a = np.zeros(n, dtype=complex)
        a[0] = rad
        for sigma in (1.0, 2.0, 4.0):
            out.append(kernel_test_function(a, sigma))
    out.append(g_log())
    return out


def rderiv_consistency(f: AnalyticFn, z, h: float = 1e-5) -> float:
    """Largest relative mismatch between R f and d/dt f(t z) at t = 1 on the rows of z."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    fd = (f.value((1 + h) * z) - f.value((1 - h) * z)) / (2 * h)
    ex = f.rderiv(z)
    return float(np.max(np.abs(fd - ex) / np.maximum(1.0, np.abs(ex))))


# ------------------------------------------------------------------ norms


def _dim(f: AnalyticFn, n: int | None) -> int:
    if n is not None:
        if f.n is not None and f.n != n:
            raise ValueError(f"function lives in dimension {f.n}, not {n}")
        return n
    return f.n or 1


def _lp_integral(vals_fn: Callable, p: float, alpha: float, n: int, cfg: QuadConfig, foci) -> float:
    return integrate_ball(lambda z: np.abs(vals_fn(z)) ** p, alpha, cfg, n=n, foci=list(foci) or None)


def bergman_norm(f: AnalyticFn, p: float, alpha: float, cfg: QuadConfig = DEFAULT, *, n: int | None = None,
                 divergence_check: bool = True, growth: float = 10.0) -> float:
    """||f||_{p, alpha} = (int |f|^p dv_alpha)^{1/p}.

    With ``divergence_check`` the integral is also evaluated on a rule with half
    the nodes; if the value grows by ``growth`` or more between the two levels the
    integral is reported as numerically infinite (``math.inf``).
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if not alpha > -1:
        raise ValueError("alpha must exceed -1")
    n = _dim(f, n)
    fine = _lp_integral(f.value, p, alpha, n, cfg, f.foci)
    if divergence_check:
        coarse = _lp_integral(f.value, p, alpha, n, cfg.scaled(0.5), f.foci)
        if coarse > 0 and fine / coarse >= growth:
            return math.inf
    return fine ** (1.0 / p)


def sphere_directions(n: int, m: int = 256) -> np.ndarray:
    """Deterministic unit vectors: m angles for n = 1, a Hopf-type grid for n = 2."""
    if n == 1:
        t = 2 * np.pi * np.arange(m) / m
        return np.exp(1j * t)[:, None]
    if n != 2:
        raise ValueError("directions implemented for n = 1, 2")
    k = max(4, int(round(math.sqrt(m))))
    out = []
    for i in range(k + 1):
        t = 0.5 * np.pi * i / k
        c, s = math.cos(t), math.sin(t)
        m1 = max(1, int(round(2 * k * c))) if c > 1e-12 else 1
        m2 = max(1, int(round(2 * k * s))) if s > 1e-12 else 1
        for p1 in range(m1):
            for p2 in range(m2):
                out.append([c * np.exp(2j * np.pi * p1 / m1), s * np.exp(2j * np.pi * p2 / m2)])
    return np.array(out, dtype=complex)


@dataclass
class SupReport:
    value: float
    maximizer: np.ndarray
    saturated: bool
    radii: np.ndarray
    shell_max: np.ndarray

    def to_dict(self) -> dict:
        return {"value": self.value, "maximizer": [[float(x.real), float(x.imag)] for x in self.maximizer],
                "saturated": bool(self.saturated), "radii": self.radii.tolist(), "shell_max": self.shell_max.tolist()}


def weighted_sup(F: Callable, weight_exp: float, n: int, *, J: int = 12, directions: int = 256,
                 extra_directions=(), refine: bool = True) -> SupReport:
    """sup_z |F(z)| (1 - |z|^2)^weight_exp over a dyadic probe grid with radial refinement.

    The coarse grid uses radii 0 and 1 - 2^{-j/4}, j = 1..4J; the best probe is then
    refined in |z| between its neighbouring radii. ``saturated`` is set when the
    maximizer sits on the outermost shell.
    """
    dirs = sphere_directions(n, directions)
    if len(extra_directions):
        ex = np.atleast_2d(np.asarray(extra_directions, dtype=complex))
        ex = ex / np.sqrt(norm2(ex))[:, None]
        dirs = np.vstack([dirs, ex])
    radii = np.concatenate([[0.0], 1.0 - 2.0 ** (-np.arange(1, 4 * J + 1) / 4.0)])

    def g(r, d):
        z = r[:, None, None] * d[None, :, :]
        vals = np.abs(F(z.reshape(-1, n))).reshape(len(r), len(d))
        return vals * (1.0 - r * r)[:, None] ** weight_exp

    vals = g(radii, dirs)
    shell_max = vals.max(axis=1)
    i, k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best, r_best, d_best = float(vals[i, k]), float(radii[i]), dirs[k]
    if refine and best > 0 and 0 < i < len(radii) - 1:
        res = minimize_scalar(lambda r: -float(g(np.array([r]), d_best[None, :])[0, 0]),
                              bounds=(radii[i - 1], radii[i + 1]), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best, r_best = float(-res.fun), float(res.x)
    if refine and best > 0 and n == 1 and 0 < i < len(radii) - 1:
        step = 2 * np.pi / directions
        t0 = float(np.angle(d_best[0]))
        res = minimize_scalar(lambda t: -float(g(np.array([r_best]), np.array([[np.exp(1j * t)]]))[0, 0]),
                              bounds=(t0 - step, t0 + step), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best, d_best = float(-res.fun), np.array([np.exp(1j * res.x)])
    return SupReport(best, r_best * d_best, bool(i == len(radii) - 1), radii, shell_max)


def bloch_norm(f: AnalyticFn, alpha: float, *, n: int | None = None, J: int = 12, directions: int = 256,
               report: bool = False):
    """||f||_{B^alpha} = sup |Rf(z)| (1 - |z|^2)^alpha, with the maximizer and a saturation flag."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    n = _dim(f, n)
    rep = weighted_sup(f.rderiv, alpha, n, J=J, directions=directions, extra_directions=f.foci)
    return rep if report else rep.value


def growth_norm(f: AnalyticFn, exponent: float, *, n: int | None = None, J: int = 12, directions: int = 256) -> float:
    """sup |f(z)| (1 - |z|^2)^exponent."""
    n = _dim(f, n)
    return weighted_sup(f.value, exponent, n, J=J, directions=directions, extra_directions=f.foci).value


def little_bloch_probe(f: AnalyticFn, alpha: float, *, n: int | None = None, J: int = 12, directions: int = 256,
                       tol: float = 1e-3) -> TrendReport:
    """Trend of max_{|z| = r} |Rf(z)| (1 - r^2)^alpha over r = 1 - 2^{-j}."""
    n = _dim(f, n)
    dirs = sphere_directions(n, directions)
    if f.foci:
        ex = np.atleast_2d(np.asarray(f.foci, dtype=complex))
        dirs = np.vstack([dirs, ex / np.sqrt(norm2(ex))[:, None]])
    radii = dyadic_radii(J)
    z = radii[:, None, None] * dirs[None, :, :]
    vals = np.abs(f.rderiv(z.reshape(-1, n))).reshape(len(radii), len(dirs)).max(axis=1)
    vals = vals * (1.0 - radii**2) ** alpha
    return vanishing_verdict(radii, vals, tol=tol)


def default_a_probes(n: int, J: int = 8, extra=()) -> np.ndarray:
    """a = 0 and a = (1 - 2^{-j}) e for coordinate directions e (and extra directions)."""
    dirs = [np.eye(n, dtype=complex)[k] for k in range(n)]
    for p in extra:
        p = np.asarray(p, dtype=complex)
        if float(norm2(p)) > 0:
            dirs.append(p / math.sqrt(float(norm2(p))))
    out = [np.zeros(n, dtype=complex)]
    for d in dirs:
        for j in range(1, J + 1):
            out.append((1.0 - 2.0**-j) * d)
    return np.array(out)


def fpqs_integral(f: AnalyticFn, p: float, q: float, s: float, a, cfg: QuadConfig = DEFAULT, *, n: int | None = None) -> float:
    """int |Rf|^p (1 - |z|^2)^q (1 - |phi_a(z)|^2)^s dv for one a."""
    n = _dim(f, n)
    a = np.asarray(a, dtype=complex).reshape(-1)
    aa = float(norm2(a))
    e = q + s

    def integrand(z):
        k = ((1.0 - aa) / np.abs(1.0 - inner(z, a)) ** 2) ** s if s != 0 else 1.0
        return np.abs(f.rderiv(z)) ** p * k

    foci = list(f.foci) + ([a] if aa > 0 and s != 0 else [])
    val = integrate_ball(integrand, e, cfg, n=n, foci=foci or None)
    return val / normalizing_constant(n, e)


def fpqs_norm(f: AnalyticFn, p: float, q: float, s: float, a_probes=None, cfg: QuadConfig = DEFAULT, *,
              n: int | None = None) -> float:
    """sup over a-probes of the F(p, q, s) integral, to the power 1/p."""
    n = _dim(f, n)
    if not p > 0:
        raise ValueError("p must be positive")
    if not q > -n - 1:
        raise ValueError(f"q must exceed -(n+1) = {-n - 1}")
    if not s >= 0:
        raise ValueError("s must be nonnegative")
    if not q + s > -1:
        raise ValueError("q + s must exceed -1")
    if a_probes is None:
        a_probes = default_a_probes(n, extra=f.foci)
    best = max(fpqs_integral(f, p, q, s, a, cfg, n=n) for a in np.atleast_2d(a_probes))
    return best ** (1.0 / p)
