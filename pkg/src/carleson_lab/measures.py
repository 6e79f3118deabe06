"""Declarative positive Borel measures on B_n and the quantities built from them.

Densities are integrated by the tensor rules of :mod:`quadrature`, with the
power (1 - |z|^2)^theta absorbed into the Gauss-Jacobi weight; atomic measures
are handled by exact finite sums. Ball masses of densities are computed after
pulling D(z, r) back to the Euclidean ball {|w| < tanh r} with phi_z, where the
integrand is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .geometry import bergman_dist, check_domain, inner, mobius, norm2
from .quadrature import DEFAULT, QuadConfig, ball_rule, integrate_ball, integrate_radial, normalizing_constant


def _h_one(z):
    return np.ones(z.shape[0])


def _h_half_plane_bump(z):
    return (1.0 + z[:, 0].real) ** 2 / 4.0


def _h_angular_cos2(z):
    a = np.abs(z[:, 0])
    safe = np.where(a > 0, a, 1.0)
    return np.where(a > 0, (z[:, 0].real / safe) ** 2, 1.0)


BUILTIN_DENSITIES: dict[str, Callable] = {
    "one": _h_one,
    "half_plane_bump": _h_half_plane_bump,
    "angular_cos2": _h_angular_cos2,
}

_small_rules: dict = {}


def _unit_ball_rule(n: int, cfg: QuadConfig):
    """Modest rule for smooth integrands on the unit ball (ball masses)."""
    key = (n, cfg.radial_nodes, cfg.angular_nodes)
    if key not in _small_rules:
        small = QuadConfig(radial_nodes=max(16, cfg.radial_nodes // 4), angular_nodes=max(32, cfg.angular_nodes // 4))
        pts, w, _ = ball_rule(n, 0.0, small)
        _small_rules[key] = (pts, w)
    return _small_rules[key]


class Measure:
    """A positive Borel measure on B_n."""

    is_radial = False

    def integrate(self, F: Callable, n: int, cfg: QuadConfig = DEFAULT, *, foci=None, zonal: bool = False):
        """int F dmu for a vectorised evaluator F: (N, n) -> (N,)."""
        raise NotImplementedError

    def total_mass(self, n: int) -> float:
        raise NotImplementedError

    def ball_masses(self, centers, r: float, cfg: QuadConfig = DEFAULT) -> np.ndarray:
        """mu(D(c, r)) for each row c of ``centers``."""
        raise NotImplementedError

    def radial_moments(self, k: np.ndarray, n: int) -> np.ndarray:
        """int |w|^{2k} dmu(w); defined for radial measures only."""
        raise TypeError(f"{type(self).__name__} is not radial")

    def scale(self, c: float) -> "Measure":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def is_zero(self) -> bool:
        return False

    def __add__(self, other: "Measure") -> "Sum":
        return Sum((self, other))

    def __rmul__(self, c: float) -> "Measure":
        return self.scale(c)


@dataclass(frozen=True)
class WeightedDensity(Measure):
    """dmu = coef * h(z) (1 - |z|^2)^theta dv with h a named builtin."""

    h: str = "one"
    theta: float = 0.0
    coef: float = 1.0

    def __post_init__(self):
        if self.h not in BUILTIN_DENSITIES:
            raise ValueError(f"unknown density {self.h!r}; builtins: {sorted(BUILTIN_DENSITIES)}")
        if not self.theta > -1:
            raise ValueError(f"theta = {self.theta} gives infinite mass near the sphere (need theta > -1)")
        if self.coef < 0:
            raise ValueError("densities must be nonnegative")

    @property
    def is_radial(self) -> bool:
        return self.h == "one"

    def density(self, z: np.ndarray) -> np.ndarray:
        return self.coef * BUILTIN_DENSITIES[self.h](z) * (1.0 - norm2(z)) ** self.theta

    def integrate(self, F, n, cfg=DEFAULT, *, foci=None, zonal=False):
        if self.coef == 0:
            return 0.0
        hf = BUILTIN_DENSITIES[self.h]
        if self.h == "one":
            g = F
        else:
            zonal = False

            def g(z):
                return F(z) * hf(z)

        val = integrate_ball(g, self.theta, cfg, n=n, foci=foci, zonal=zonal)
        return self.coef * val / normalizing_constant(n, self.theta)

    def total_mass(self, n):
        if self.h == "one":
            return self.coef / normalizing_constant(n, self.theta)
        return self.integrate(lambda z: np.ones(z.shape[0]), n)

    def radial_moments(self, k, n):
        if self.h != "one":
            return super().radial_moments(k, n)
        k = np.asarray(k, dtype=float)
        # n int_0^1 u^{n-1+k} (1-u)^theta du
        return self.coef * n * np.exp(special.gammaln(n + k) + special.gammaln(self.theta + 1)
                                      - special.gammaln(n + k + self.theta + 1))

    def ball_masses(self, centers, r, cfg=DEFAULT):
        centers = np.atleast_2d(np.asarray(centers, dtype=complex))
        n = centers.shape[1]
        if self.coef == 0:
            return np.zeros(len(centers))
        xi, wq = _unit_ball_rule(n, cfg)
        R = math.tanh(r)
        w = R * xi
        scale = R ** (2 * n)
        out = np.empty(len(centers))
        step = max(1, (1 << 20) // len(w))
        for s in range(0, len(centers), step):
            c = centers[s:s + step]
            cc = norm2(c)[:, None]
            d = np.abs(1.0 - w @ c.conj().T).T  # |1 - <w, c>|, shape (M, N)
            one_minus = (1.0 - cc) * (1.0 - norm2(w))[None, :] / d**2
            jac = ((1.0 - cc) / d**2) ** (n + 1)
            dens = one_minus ** self.theta
            if self.h != "one":
                x = mobius(c[:, None, :], w[None, :, :], check=False)
                dens = dens * BUILTIN_DENSITIES[self.h](x.reshape(-1, n)).reshape(dens.shape)
            out[s:s + step] = self.coef * scale * np.sum(dens * jac * wq[None, :], axis=1)
        return out

    def scale(self, c):
        return WeightedDensity(self.h, self.theta, self.coef * c)

    def to_dict(self):
        d = {"type": "weighted_density", "theta": self.theta, "h": self.h}
        if self.coef != 1.0:
            d["coef"] = self.coef
        return d

    def is_zero(self):
        return self.coef == 0


def RadialPower(theta: float, coef: float = 1.0) -> WeightedDensity:
    """dmu = coef * (1 - |z|^2)^theta dv."""
    return WeightedDensity("one", theta, coef)


def weighted_volume(beta: float, n: int) -> WeightedDensity:
    """dv_beta = c_beta (1 - |z|^2)^beta dv."""
    return WeightedDensity("one", beta, normalizing_constant(n, beta))


@dataclass(frozen=True)
class Atomic(Measure):
    """Finite sum of point masses."""

    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 1), dtype=complex))
    masses: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=complex))
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if len(pts) != len(m):
            raise ValueError("points and masses differ in length")
        if np.any(m <= 0):
            raise ValueError("atom masses must be positive")
        if len(pts):
            check_domain(pts)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)

    def integrate(self, F, n, cfg=DEFAULT, *, foci=None, zonal=False):
        if len(self.masses) == 0:
            return 0.0
        return float(np.sum(self.masses * np.asarray(F(self.points))))

    def total_mass(self, n):
        return float(np.sum(self.masses))

    def ball_masses(self, centers, r, cfg=DEFAULT):
        centers = np.atleast_2d(np.asarray(centers, dtype=complex))
        if len(self.masses) == 0:
            return np.zeros(len(centers))
        d = bergman_dist(centers[:, None, :], self.points[None, :, :], check=False)
        return (d < r) @ self.masses

    def scale(self, c):
        if c < 0:
            raise ValueError("measures are positive")
        if c == 0:
            return Atomic(np.zeros((0, self.points.shape[1]), dtype=complex), np.zeros(0))
        return Atomic(self.points, self.masses * c)

    def to_dict(self):
        return {"type": "atomic", "atoms": [
            {"point": [[float(x.real), float(x.imag)] for x in p], "mass": float(m)}
            for p, m in zip(self.points, self.masses)]}

    def is_zero(self):
        return len(self.masses) == 0


def atom(p, mass: float = 1.0) -> Atomic:
    return Atomic(np.atleast_2d(np.asarray(p, dtype=complex)), np.array([mass]))


def zero_measure(n: int = 1) -> "Sum":
    return Sum(())


@dataclass(frozen=True)
class Sum(Measure):
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def is_radial(self):
        return all(p.is_radial for p in self.parts)

    def integrate(self, F, n, cfg=DEFAULT, *, foci=None, zonal=False):
        return float(sum(p.integrate(F, n, cfg, foci=foci, zonal=zonal) for p in self.parts))

    def total_mass(self, n):
        return float(sum(p.total_mass(n) for p in self.parts))

    def ball_masses(self, centers, r, cfg=DEFAULT):
        centers = np.atleast_2d(np.asarray(centers, dtype=complex))
        out = np.zeros(len(centers))
        for p in self.parts:
            out = out + p.ball_masses(centers, r, cfg)
        return out

    def radial_moments(self, k, n):
        out = np.zeros(np.shape(k))
        for p in self.parts:
            out = out + p.radial_moments(k, n)
        return out

    def scale(self, c):
        return Sum(tuple(p.scale(c) for p in self.parts))

    def to_dict(self):
        return {"type": "sum", "parts": [p.to_dict() for p in self.parts]}

    def is_zero(self):
        return all(p.is_zero() for p in self.parts)

    def atoms(self) -> list:
        return [p for p in self.parts if isinstance(p, Atomic)]


# ------------------------------------------------------------ derived quantities


def _as_centers(z):
    z = np.asarray(z, dtype=complex)
    return z[None, :] if z.ndim == 1 else z


def ball_mass(mu: Measure, z, r: float, cfg: QuadConfig = DEFAULT) -> float:
    """mu(D(z, r))."""
    return float(mu.ball_masses(_as_centers(z), r, cfg)[0])


def khat(mu: Measure, r: float, alpha: float, z, cfg: QuadConfig = DEFAULT) -> float:
    """Averaging function mu(D(z, r)) / (1 - |z|^2)^{n+1+alpha}."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    return ball_mass(mu, z, r, cfg) / (1.0 - float(norm2(z))) ** (n + 1 + alpha)


def kernel_integral(mu: Measure, a, E: float, cfg: QuadConfig = DEFAULT) -> float:
    """int |1 - <w, a>|^{-E} dmu(w).

    Radial densities use the sphere average of |1 - r <zeta, a>|^{-E}, which is
    2F1(E/2, E/2; n; r^2 |a|^2), leaving a one-dimensional graded radial integral.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = a.shape[0]
    if isinstance(mu, Sum):
        return float(sum(kernel_integral(p, a, E, cfg) for p in mu.parts))
    if isinstance(mu, Atomic):
        if len(mu.masses) == 0:
            return 0.0
        return float(np.sum(mu.masses * np.abs(1.0 - inner(mu.points, a)) ** (-E)))
    if isinstance(mu, WeightedDensity):
        if mu.coef == 0:
            return 0.0
        aa = float(norm2(a))
        if mu.h == "one":
            val = integrate_radial(lambda u: special.hyp2f1(E / 2, E / 2, n, aa * u), n, mu.theta, cfg,
                                   focus_radii=(math.sqrt(aa),))
            return mu.coef * val / normalizing_constant(n, mu.theta)
        return mu.integrate(lambda w: np.abs(1.0 - inner(w, a)) ** (-E), n, cfg, foci=[a])
    return mu.integrate(lambda w: np.abs(1.0 - inner(w, a)) ** (-E), n, cfg, foci=[a])


def berezin(mu: Measure, s: float, alpha: float, z, cfg: QuadConfig = DEFAULT) -> float:
    """B_{s,alpha}(mu)(z) = (1 - |z|^2)^s int |1 - <z, w>|^{-(n+1+s+alpha)} dmu(w)."""
    if not s > 0:
        raise ValueError("s must be positive")
    z = np.asarray(z, dtype=complex).reshape(-1)
    check_domain(z)
    n = z.shape[0]
    return (1.0 - float(norm2(z))) ** s * kernel_integral(mu, z, n + 1 + s + alpha, cfg)


def berezin_quadrature(mu: Measure, s: float, alpha: float, z, cfg: QuadConfig = DEFAULT) -> float:
    """Same transform by direct quadrature over B_n (cross-check of :func:`berezin`)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    check_domain(z)
    n = z.shape[0]
    expo = n + 1 + s + alpha
    val = mu.integrate(lambda w: np.abs(1.0 - inner(w, z)) ** (-expo), n, cfg, foci=[z], zonal=mu.is_radial)
    return (1.0 - float(norm2(z))) ** s * val


@dataclass
class LatticeSequence:
    values: np.ndarray
    exponent: float
    r: float
    truncation: float


def lattice_sequence(mu: Measure, lat, exponent: float, cfg: QuadConfig = DEFAULT) -> LatticeSequence:
    """mu(D_k) / (1 - |a_k|^2)^exponent over the lattice points a_k."""
    pts = lat.points
    masses = mu.ball_masses(pts, lat.r, cfg)
    vals = masses / (1.0 - norm2(pts)) ** exponent
    return LatticeSequence(values=vals, exponent=exponent, r=lat.r, truncation=lat.truncation)


# ------------------------------------------------------------ serialisation


def measure_from_dict(d: dict) -> Measure:
    t = d.get("type")
    if t == "radial_power":
        _only(d, {"type", "theta", "coef"})
        return RadialPower(float(d["theta"]), float(d.get("coef", 1.0)))
    if t == "weighted_density":
        _only(d, {"type", "theta", "h", "coef"})
        return WeightedDensity(d.get("h", "one"), float(d["theta"]), float(d.get("coef", 1.0)))
    if t == "atomic":
        _only(d, {"type", "atoms"})
        atoms = d["atoms"]
        if not atoms:
            return Atomic()
        pts = np.array([[complex(re, im) for re, im in a["point"]] for a in atoms], dtype=complex)
        return Atomic(pts, np.array([float(a["mass"]) for a in atoms]))
    if t == "sum":
        _only(d, {"type", "parts"})
        return Sum(tuple(measure_from_dict(p) for p in d["parts"]))
    raise ValueError(f"unknown measure type {t!r}")


def _only(d: dict, allowed: set) -> None:
    extra = set(d) - allowed
    if extra:
        raise ValueError(f"unknown measure keys {sorted(extra)} for type {d.get('type')!r}")


def measure_to_dict(mu: Measure) -> dict:
    if isinstance(mu, WeightedDensity) and mu.h == "one":
        d = {"type": "radial_power", "theta": mu.theta}
        if mu.coef != 1.0:
            d["coef"] = mu.coef
        return d
    return mu.to_dict()


def parse_measure_shorthand(text: str) -> Measure:
    """``radial_power:0.5``, ``atom:0.5`` or ``atom:0.3,0.4j@2`` (point@mass), ``zero``."""
    kind, _, arg = text.partition(":")
    if kind == "radial_power":
        return RadialPower(float(arg))
    if kind == "weighted_density":
        h, _, theta = arg.partition(",")
        return WeightedDensity(h, float(theta or 0.0))
    if kind == "atom":
        coords, _, mass = arg.partition("@")
        p = np.array([complex(c.replace(" ", "")) for c in coords.split(",")], dtype=complex)
        return atom(p, float(mass) if mass else 1.0)
    if kind == "zero":
        return Sum(())
    raise ValueError(f"cannot parse measure shorthand {text!r}")
