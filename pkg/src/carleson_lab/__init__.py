"""Numerical toolkit for (lambda, gamma)-Bergman Carleson measures on the unit ball of C^n."""

from .carleson import (CarlesonParams, carleson_norm, classify_ball, classify_berezin, classify_lattice,
                       derive_params, key_lemma_check, product_inequality_check, vanishing_probe)
from .geometry import bergman_dist, mobius, pseudo_hyperbolic
from .lattice import build_lattice, verify_lattice
from .measures import Atomic, RadialPower, WeightedDensity, atom, weighted_volume, zero_measure
from .operators import (ToeplitzSpec, cesaro_apply, companion_apply, multiplier_apply, toeplitz_apply,
                        toeplitz_equivalence_check, toeplitz_norm_estimate)
from .quadrature import DEFAULT, QuadConfig, integrate_ball

__version__ = "0.1.0"

__all__ = [
    "Atomic", "CarlesonParams", "DEFAULT", "QuadConfig", "RadialPower", "ToeplitzSpec", "WeightedDensity", "atom",
    "bergman_dist", "build_lattice", "carleson_norm", "cesaro_apply", "classify_ball", "classify_berezin",
    "classify_lattice", "companion_apply", "derive_params", "integrate_ball", "key_lemma_check", "mobius",
    "multiplier_apply", "product_inequality_check", "pseudo_hyperbolic", "toeplitz_apply",
    "toeplitz_equivalence_check", "toeplitz_norm_estimate", "vanishing_probe", "verify_lattice", "weighted_volume",
    "zero_measure",
]
