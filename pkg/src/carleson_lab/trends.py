"""Decision rules on sequences sampled at dyadic radii.

A numerical classifier cannot decide whether a supremum is finite or a limit
vanishes; these rules turn a finite sample into a reproducible verdict. All
thresholds are keyword knobs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SLOPE_TOL = -0.05
TAIL_FACTOR = 10.0
VANISH_SLOPE = 0.05
TAIL_POINTS = 6


def dyadic_radii(J: int = 12) -> np.ndarray:
    """1 - 2^{-j} for j = 1..J."""
    return 1.0 - 2.0 ** -np.arange(1, J + 1, dtype=float)


def loglog_slope(radii, values, tail: int = TAIL_POINTS) -> float:
    """Least-squares slope of log(value) against log(1 - |z|) over the last ``tail`` samples.

    Returns NaN when the tail holds a zero (the logarithm is undefined there).
    """
    r = np.asarray(radii, dtype=float)[-tail:]
    v = np.asarray(values, dtype=float)[-tail:]
    if len(v) < 2 or np.any(v <= 0) or not np.all(np.isfinite(v)):
        return float("nan")
    x = np.log(1.0 - r)
    return float(np.polyfit(x, np.log(v), 1)[0])


@dataclass
class TrendReport:
    radii: np.ndarray
    values: np.ndarray
    slope: float
    verdict: str
    peak: float
    rule: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"radii": [float(x) for x in self.radii], "values": [float(x) for x in self.values],
                "slope": None if np.isnan(self.slope) else float(self.slope), "verdict": self.verdict,
                "peak": float(self.peak), "rule": self.rule}


def boundedness_verdict(radii, values, *, slope_tol: float = SLOPE_TOL, tail_factor: float = TAIL_FACTOR,
                        tail: int = TAIL_POINTS) -> TrendReport:
    """"bounded" iff the log-log tail slope is >= slope_tol and the last value < tail_factor * median."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    slope = loglog_slope(radii, values, tail)
    peak = float(np.max(values)) if len(values) else 0.0
    if not np.all(np.isfinite(values)):
        verdict = "unbounded"
    elif len(values) == 0 or values[-1] == 0.0:
        verdict = "bounded"
    elif np.isnan(slope):
        # zeros inside the tail but a positive end value: judge by the tail factor alone
        verdict = "bounded" if values[-1] < tail_factor * max(np.median(values), np.finfo(float).tiny) else "unbounded"
    else:
        ok = slope >= slope_tol and values[-1] < tail_factor * np.median(values)
        verdict = "bounded" if ok else "unbounded"
    return TrendReport(radii, values, slope, verdict, peak,
                       {"kind": "boundedness", "slope_tol": slope_tol, "tail_factor": tail_factor, "tail": tail})


def vanishing_verdict(radii, values, *, tol: float = 1e-3, slope_min: float = VANISH_SLOPE,
                      tail: int = TAIL_POINTS) -> TrendReport:
    """"vanishing" iff the last three values decrease and either final < tol * peak or the tail slope >= slope_min.

    A positive log-log slope means value ~ (1 - |z|)^slope, which tends to 0 even
    when the sampled radii stop before the value drops below tol * peak.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    peak = float(np.max(values)) if len(values) else 0.0
    slope = loglog_slope(radii, values, tail)
    if peak == 0.0:
        verdict = "vanishing"
    elif not np.all(np.isfinite(values)):
        verdict = "not_vanishing"
    else:
        last3 = values[-3:]
        decreasing = bool(np.all(np.diff(last3) <= 0)) and last3[-1] < last3[0]
        small = values[-1] < tol * peak or values[-1] == 0.0
        steep = not np.isnan(slope) and slope >= slope_min
        verdict = "vanishing" if decreasing and (small or steep) else "not_vanishing"
    return TrendReport(radii, values, slope, verdict, peak,
                       {"kind": "vanishing", "tol": tol, "slope_min": slope_min, "tail": tail})


def cauchy_verdict(shell_radii, partial_sums, *, power: float = 1.0, rel: float = 0.05, min_shells: int = 4,
                   decay_min: float = VANISH_SLOPE, tail: int = TAIL_POINTS) -> TrendReport:
    """Convergence of a norm accumulated over dyadic shells.

    ``partial_sums`` are the running sums of |x|^power (or integrals of |f|^power);
    the reported values are the partial norms S_j^{1/power}. The shell increments
    are fitted as (1 - r)^e over the last ``tail`` shells and the verdict is
    "convergent" iff e >= decay_min. This separates the logarithmically divergent
    boundary case, whose increments stay flat, from slowly converging sums that
    a fixed relative-increment cut cannot resolve in ten shells. When the fit is
    undefined (zeros inside the tail) the last relative increment of the norm
    must fall below ``rel``. Fewer than ``min_shells`` shells gives "inconclusive".
    """
    radii = np.asarray(shell_radii, dtype=float)
    partial = np.asarray(partial_sums, dtype=float)
    norms = np.maximum(partial, 0.0) ** (1.0 / power)
    peak = float(norms[-1]) if len(norms) else 0.0
    rule = {"kind": "cauchy", "rel": rel, "min_shells": min_shells, "decay_min": decay_min, "power": power}
    if len(partial) < min_shells:
        return TrendReport(radii, norms, float("nan"), "inconclusive", peak, rule)
    if not np.all(np.isfinite(partial)):
        return TrendReport(radii, norms, float("nan"), "divergent", peak, rule)
    last = norms[-1]
    rel_inc = 0.0 if last == 0 else (last - norms[-2]) / last
    inc = np.diff(partial)[-tail:]
    if np.all(inc <= 0):
        decay = float("inf")
    elif np.any(inc <= 0):
        # increments already vanish inside the tail (finitely supported sequence)
        decay = float("inf") if inc[-1] <= 0 else float("nan")
    else:
        x = np.log(1.0 - radii[1:][-tail:])
        decay = float(np.polyfit(x, np.log(inc), 1)[0])
    rule["last_relative_increment"] = float(rel_inc)
    rule["decay_exponent"] = None if np.isnan(decay) else (decay if np.isfinite(decay) else "inf")
    ok = rel_inc < rel if np.isnan(decay) else decay >= decay_min
    return TrendReport(radii, norms, decay if np.isfinite(decay) else float("nan"),
                       "convergent" if ok else "divergent", peak, rule)
