"""Möbius maps, pseudo-hyperbolic and Bergman distances on the unit ball B_n.

Points are complex numpy arrays whose last axis holds the n coordinates, so
every function here broadcasts over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOMAIN_EPS = 1e-14
# arctanh(1 - 1e-16) is about 18.7; anything at or above is reported as saturated
_RHO_MAX = 1.0 - 1e-16


class DomainError(ValueError):
    """Raised when a point lies outside the open unit ball or dimensions differ."""


def point(*coords) -> np.ndarray:
    """Build a validated point of B_n from scalar coordinates.

    ``point(0.5)`` is the disk point 0.5, ``point(0.3, 0.4j)`` a point of B_2.
    A single sequence argument is also accepted.
    """
    if len(coords) == 1 and np.ndim(coords[0]) == 1:
        coords = tuple(coords[0])
    z = np.asarray(coords, dtype=complex)
    check_domain(z)
    return z


def check_domain(z: np.ndarray) -> None:
    z = np.asarray(z)
    if z.ndim == 0 or z.shape[-1] < 1:
        raise DomainError("a point needs at least one complex coordinate")
    norms = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
    if not np.all(np.isfinite(norms)):
        raise DomainError("non-finite coordinates")
    if np.any(norms >= 1.0 - DOMAIN_EPS):
        raise DomainError(f"|z| = {np.max(norms):.17g} is outside the ball (limit 1 - {DOMAIN_EPS:g})")


def _same_dim(a: np.ndarray, z: np.ndarray) -> None:
    if a.shape[-1] != z.shape[-1]:
        raise DomainError(f"dimension mismatch: {a.shape[-1]} vs {z.shape[-1]}")


def inner(z, w) -> np.ndarray:
    """<z, w> = sum_k z_k conj(w_k) over the last axis."""
    return np.sum(np.asarray(z) * np.conj(np.asarray(w)), axis=-1)


def norm2(z) -> np.ndarray:
    z = np.asarray(z)
    return np.sum(z.real**2 + z.imag**2, axis=-1)


def mobius(a, z, *, check: bool = True) -> np.ndarray:
    """The involutive automorphism phi_a of B_n exchanging 0 and a.

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), with P_a the orthogonal
    projection onto the complex line through a, Q_a = I - P_a and
    s_a = sqrt(1 - |a|^2). For a = 0 this is z -> -z.
    """
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    _same_dim(a, z)
    if check:
        check_domain(a)
        check_domain(z)
    aa = norm2(a)[..., None]
    za = inner(z, a)[..., None]
    safe = np.where(aa > 0, aa, 1.0)
    pz = np.where(aa > 0, za / safe * a, 0.0)
    qz = z - pz
    sa = np.sqrt(1.0 - aa)
    return (a - pz - sa * qz) / (1.0 - za)


def one_minus_mobius_sq(a, z) -> np.ndarray:
    """1 - |phi_a(z)|^2 through the closed-form identity, no cancellation."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return (1.0 - norm2(a)) * (1.0 - norm2(z)) / np.abs(1.0 - inner(z, a)) ** 2


def pseudo_hyperbolic(z, w, *, check: bool = True) -> np.ndarray:
    """rho(z, w) = |phi_z(w)|, evaluated in a cancellation-free form.

    With d = w - z the numerator of phi_z(w) is -(P_z d + s_z Q_z d), so
    |1 - <z,w>|^2 rho^2 = (1 - |z|^2) |d|^2 + |<d, z>|^2, a sum of nonnegative terms.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _same_dim(z, w)
    if check:
        check_domain(z)
        check_domain(w)
    d = w - z
    sz = 1.0 - norm2(z)
    dz = inner(d, z)
    num = sz * norm2(d) + np.abs(dz) ** 2
    rho = np.sqrt(num) / np.abs(sz - dz)
    return np.minimum(rho, 1.0)


def bergman_dist(z, w, *, check: bool = True, return_flag: bool = False):
    """beta(z, w) = arctanh(rho(z, w)) = 1/2 log((1 + rho) / (1 - rho)).

    When rho rounds to 1 the distance is clamped to a large finite value;
    with ``return_flag=True`` a boolean saturation mask is returned as well.
    """
    rho = pseudo_hyperbolic(z, w, check=check)
    saturated = rho >= _RHO_MAX
    beta = np.arctanh(np.minimum(rho, _RHO_MAX))
    if return_flag:
        return beta, saturated
    return beta


def dist_from_origin(w) -> np.ndarray:
    return np.arctanh(np.minimum(np.sqrt(norm2(w)), _RHO_MAX))


@dataclass(frozen=True)
class MetricBall:
    """Bergman metric ball D(center, radius)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=complex).reshape(-1)
        check_domain(c)
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.center.shape[-1]

    def contains(self, w) -> np.ndarray:
        return ball_membership(self, w)


def ball_membership(ball: MetricBall, w) -> np.ndarray:
    return bergman_dist(ball.center, w) < ball.radius


def ball_ellipsoid(center, radius: float):
    """Euclidean description of D(center, radius).

    Returns (c, s_line, s_perp): the Euclidean center, the semi-axis inside the
    complex line through ``center`` and the semi-axis orthogonal to it.
    """
    a = np.asarray(center, dtype=complex)
    R = np.tanh(radius)
    aa = float(norm2(a))
    den = 1.0 - R**2 * aa
    c = (1.0 - R**2) * a / den
    s_line = R * (1.0 - aa) / den
    s_perp = R * np.sqrt((1.0 - aa) / den)
    return c, s_line, s_perp


def euclidean_radius_bound(center_norm: float, radius: float) -> float:
    """Upper bound on |w - center| for w in D(center, radius)."""
    R = np.tanh(radius)
    aa = center_norm**2
    den = 1.0 - R**2 * aa
    shift = center_norm * R**2 * (1.0 - aa) / den
    return shift + R * np.sqrt((1.0 - aa) / den)


def ball_euclidean_hull(ball: MetricBall, pad: float = 1e-12):
    """Tight axis-aligned box in R^{2n} containing D(center, radius).

    D(a, r) is the ellipsoid phi_a({|w| < tanh r}); its half-width along a real
    coordinate axis e is sqrt(s_line^2 |P e|^2 + s_perp^2 |(I - P) e|^2), where P
    projects onto the real 2-plane spanned by a and i a.

    Returns (lo, hi), arrays of shape (2n,) ordered (Re z_1, Im z_1, Re z_2, ...).
    """
    a = ball.center
    n = a.shape[-1]
    c, s_line, s_perp = ball_ellipsoid(a, ball.radius)
    centre_r = np.empty(2 * n)
    centre_r[0::2] = c.real
    centre_r[1::2] = c.imag
    aa = float(norm2(a))
    half = np.empty(2 * n)
    for k in range(2 * n):
        if aa == 0.0:
            p2 = 0.0
        else:
            # e_k as a complex vector; |P e|^2 = |<e, a>|^2 / |a|^2 for the complex line
            ek = np.zeros(n, dtype=complex)
            ek[k // 2] = 1.0 if k % 2 == 0 else 1j
            p2 = abs(inner(ek, a)) ** 2 / aa
        half[k] = np.sqrt(s_line**2 * p2 + s_perp**2 * (1.0 - p2))
    return centre_r - half - pad, centre_r + half + pad


def to_real(z) -> np.ndarray:
    """(..., n) complex -> (..., 2n) real, interleaving real and imaginary parts."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def from_real(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def unitary_to_e1(a) -> np.ndarray:
    """Unitary U with U a = |a| e_1 (identity when a = 0)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    r = np.sqrt(float(norm2(a)))
    if r == 0.0:
        return np.eye(n, dtype=complex)
    u = a / r
    # complete u to an orthonormal basis; rows of U are conj(basis vectors)
    basis = [u]
    for k in range(n):
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        for b in basis:
            v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n:
            break
    return np.conj(np.array(basis))
