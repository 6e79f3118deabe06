"""Fixed, versioned families of measures used by the property checks."""

from __future__ import annotations

import numpy as np

from .measures import Atomic, Measure, RadialPower

MEASURE_BATTERY_VERSION = "measures-v1"

RADIAL_THETAS = tuple(-1.0 + 0.25 * k for k in range(1, 13))


def _embed(z: np.ndarray, n: int, tilt: float = 0.6) -> np.ndarray:
    """Disk points as points of B_n; in B_2 the modulus is split over both coordinates."""
    z = np.asarray(z, dtype=complex)
    if n == 1:
        return z[:, None]
    c, s = np.cos(tilt), np.sin(tilt)
    return np.stack([c * z, s * np.abs(z) * np.exp(2j * np.angle(z))], axis=-1)


def atomic_sets(n: int = 1) -> list[tuple[str, Atomic]]:
    single = Atomic(_embed(np.array([0.5]), n), np.array([1.0]))
    radii = np.array([0.3, 0.6, 0.8, 0.9, 0.95, 0.99])
    spread = Atomic(_embed(radii * np.exp(2j * np.pi * np.arange(6) / 6), n),
                    np.array([1.0, 0.5, 0.25, 0.1, 0.05, 0.01]))
    ring = Atomic(_embed(0.9 * np.exp(2j * np.pi * (np.arange(24) + 0.5) / 24), n), np.full(24, 0.1))
    return [("atom_single", single), ("atom_spread", spread), ("atom_ring", ring)]


def measure_battery(n: int = 1) -> list[tuple[str, Measure]]:
    out: list[tuple[str, Measure]] = [(f"radial_power({t:g})", RadialPower(t)) for t in RADIAL_THETAS]
    out.extend(atomic_sets(n))
    return out
