"""Acceptance suites: one suite per group of checks, with a deterministic summary.

Every check records a name, a pass flag and the numbers it was judged on.
Wall-clock timings are kept apart from the summary so that two runs with the
same configuration produce byte-identical summary JSON.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .batteries import atomic_sets, measure_battery
from .carleson import (CarlesonParams, carleson_norm, classify_ball, classify_berezin, classify_lattice,
                       default_lattice_for, derive_params, product_inequality_check, to_json, vanishing_probe)
from .geometry import inner, mobius, norm2, one_minus_mobius_sq
from .lattice import build_lattice, packing_overlap_bound, verify_lattice
from .measures import RadialPower, atom, kernel_integral, weighted_volume, zero_measure
from .operators import (ToeplitzSpec, cesaro_apply, fpqs_bloch_ratios, ig_trichotomy_check, jg_boundedness_check,
                        mg_trichotomy_check, operator_identities, toeplitz_apply, toeplitz_compactness_probe,
                        toeplitz_equivalence_check, toeplitz_norm_estimate)
from .quadrature import DEFAULT, integrate_ball
from .spaces import battery, constant, g_log, kernel_test_function, monomial

SUMMARY_VERSION = 1

# pinned tolerances and brackets
GEOMETRY_TOL = 1e-10
VOLUME_TOL = 1e-8
LEMMA_RATIO_MAX = 50.0
FLIP_OFFSET = 0.1
PRODUCT_BRACKET = (1e-2, 1e2)
REPRODUCE_TOL = {1: 1e-8, 2: 1e-6}
IDENTITY_TOL = 1e-7
FPQS_BRACKET = (0.2, 5.0)


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": bool(self.passed), "detail": self.detail}


def _random_pairs(count: int, n: int, seed: int):
    rng = np.random.default_rng(seed)

    def draw():
        z = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
        r = rng.uniform(0.0, 1.0, count) ** (1.0 / (2 * n)) * 0.999
        return z / np.sqrt(norm2(z))[:, None] * r[:, None]

    return draw(), draw()


# ------------------------------------------------------------------ suites


def suite_geometry(seed: int = 0) -> list[Check]:
    out = []
    for n in (1, 2):
        a, z = _random_pairs(10_000, n, seed + n)
        w = mobius(a, z)
        lhs = 1.0 - norm2(w)
        rhs = one_minus_mobius_sq(a, z)
        ident = float(np.max(np.abs(lhs - rhs)))
        invol = float(np.max(np.sqrt(norm2(mobius(a, w) - z))))
        out.append(Check(1, f"mobius identity n={n}", ident < GEOMETRY_TOL, {"max_residual": ident, "pairs": 10_000}))
        out.append(Check(1, f"mobius involution n={n}", invol < GEOMETRY_TOL, {"max_residual": invol, "pairs": 10_000}))
    return out


def lemma_integral(c: float, t: float, z) -> float:
    """int (1 - |w|^2)^t |1 - <z, w>|^{-(n+1+t+c)} dv(w)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    return kernel_integral(RadialPower(t), z, len(z) + 1 + t + c)


def suite_quadrature(seed: int = 0) -> list[Check]:
    out = []
    for n in (1, 2):
        for alpha in (-0.5, 0.0, 1.0, 2.5):
            v = integrate_ball(lambda z: np.ones(z.shape[0]), alpha, DEFAULT, n=n)
            out.append(Check(2, f"volume n={n} alpha={alpha:g}", abs(v - 1.0) < VOLUME_TOL, {"value": v}))
        for alpha in (0.0, 1.0):
            for k in (1, 2, 3):
                got = integrate_ball(lambda z, k=k: np.abs(z[:, 0]) ** (2 * k), alpha, DEFAULT, n=n) ** 0.5
                # ||z_1^k||_{2,alpha}^2 = k! / (n+1+alpha)_k
                ref = math.sqrt(math.exp(special.gammaln(k + 1) - special.gammaln(n + 1 + alpha + k)
                                         + special.gammaln(n + 1 + alpha)))
                out.append(Check(2, f"monomial norm z1^{k} n={n} alpha={alpha:g}", abs(got - ref) < VOLUME_TOL,
                                 {"value": got, "oracle": ref}))
    radii = (0.0, 0.5, 0.9, 0.99, 0.999)
    for n in (1, 2):
        for c, t in ((0.5, 0.5), (1.0, 0.0), (2.0, 1.0)):
            vals = []
            for r in radii:
                z = np.zeros(n, dtype=complex)
                z[0] = r
                vals.append(lemma_integral(c, t, z) * (1.0 - r * r) ** c)
            ratio = max(vals) / min(vals)
            out.append(Check(3, f"I_ct bracket n={n} c={c:g} t={t:g}", min(vals) > 0 and ratio < LEMMA_RATIO_MAX,
                             {"scaled_values": vals, "max_min_ratio": ratio}))
    # the hypergeometric reduction against direct ball quadrature at one interior point
    z = np.array([0.9 + 0.0j])
    direct = integrate_ball(lambda w: (1.0 - norm2(w)) ** 1.0 * np.abs(1.0 - inner(w, z)) ** -5.0, 0.0, DEFAULT,
                            n=1, foci=[z])
    red = lemma_integral(2.0, 1.0, z)
    out.append(Check(3, "I_ct reduction vs direct quadrature", abs(direct / red - 1) < 1e-8,
                     {"direct": direct, "reduced": red}))
    return out


LATTICE_TRUNCATION = 1e-2


def suite_lattice(seed: int = 0) -> list[Check]:
    out = []
    for r in (0.25, 0.5, 1.0):
        lat = build_lattice(r, 1, LATTICE_TRUNCATION, seed=seed)
        rep = verify_lattice(lat, 10_000, seed=seed)
        bound = packing_overlap_bound(1, r, r / 2)
        ok = rep["covering_misses"] == 0 and rep["separation_ok"] and rep["max_overlap"] <= bound
        rep = dict(rep, overlap_bound=bound)
        out.append(Check(4, f"lattice r={r:g}", ok, rep))
    return out


def _flip_checks(criterion, params: CarlesonParams, classifiers: dict) -> list[Check]:
    th = params.threshold
    out = []
    for name, fn in classifiers.items():
        below = fn(RadialPower(th - FLIP_OFFSET), params).verdict
        at = fn(RadialPower(th), params).verdict
        above = fn(RadialPower(th + FLIP_OFFSET), params).verdict
        want_at = "carleson" if params.lam >= 1 else "not_carleson"
        ok = below == "not_carleson" and above == "carleson" and at == want_at
        out.append(Check(criterion, f"flip {name} n={params.n} lambda={params.lam:g} gamma={params.gamma:g}", ok,
                         {"threshold": th, "below": below, "at": at, "above": above}))
    return out


def _agreement(criterion, params, battery_, classifiers: dict, label: str) -> Check:
    rows = {}
    ok = True
    for name, mu in battery_:
        v = {k: fn(mu, params).verdict for k, fn in classifiers.items()}
        rows[name] = v
        ok = ok and len(set(v.values())) == 1 and "inconclusive" not in v.values()
    return Check(criterion, f"{label} agreement n={params.n} lambda={params.lam:g} gamma={params.gamma:g}", ok,
                 {"verdicts": rows})


def suite_theoremA(seed: int = 0) -> list[Check]:
    out = []
    cls = {"ball": classify_ball, "berezin": classify_berezin}
    for n in (1, 2):
        for lam, g in ((1.0, 0.0), (1.5, 0.5)):
            P = CarlesonParams(lam, g, n)
            out.append(_agreement(5, P, measure_battery(n), cls, "ball/berezin"))
            out.extend(_flip_checks(5, P, cls))
    return out


def suite_theoremB(seed: int = 0) -> list[Check]:
    out = []
    lat = default_lattice_for(1)
    cls = {"lattice": lambda mu, P: classify_lattice(mu, P, lat), "berezin": classify_berezin}
    for lam, g in ((0.5, 0.0), (0.75, 0.5)):
        P = CarlesonParams(lam, g, 1)
        out.append(_agreement(6, P, measure_battery(1), cls, "lattice/berezin"))
        out.extend(_flip_checks(6, P, cls))
    return out


PRODUCT_TUPLES = {(1.0, 0.0): ((2.0, 1.0, 0.0), (2.0, 1.0, 0.0)),
                  (1.5, 0.5): ((2.0, 1.5, 0.5), (2.0, 1.5, 0.5))}


def suite_theorem11(seed: int = 0, trials: int = 64) -> list[Check]:
    out = []
    lo, hi = PRODUCT_BRACKET
    for (lam, g), tuples in PRODUCT_TUPLES.items():
        P = derive_params(tuples, 1)
        rows = {}
        ok = True
        for name, mu in measure_battery(1):
            rep = product_inequality_check(mu, tuples, n=1, trials=trials, seed=seed)
            rows[name] = {"C_est": rep["C_est"], "norm": rep["carleson_norm"], "ratio": rep["ratio"]}
            ok = ok and rep["C_est"] > 0 and lo <= rep["ratio"] <= hi
        out.append(Check(7, f"product ratio bracket lambda={P.lam:g} gamma={P.gamma:g}", ok, {"rows": rows}))
        z = product_inequality_check(zero_measure(1), tuples, n=1, trials=trials, seed=seed)
        out.append(Check(7, f"zero measure lambda={P.lam:g}", z["C_est"] == 0.0, {"C_est": z["C_est"]}))
    return out


TOEPLITZ_BETA = 1.0


def suite_toeplitz(seed: int = 0) -> list[Check]:
    out = []
    rows, ok = {}, True
    for name, mu in measure_battery(1):
        rep = toeplitz_equivalence_check(ToeplitzSpec(mu, TOEPLITZ_BETA), trials=8, seed=seed)
        rows[name] = {k: rep[k] for k in ("operator_verdict", "carleson_verdict", "ratio", "consistent")}
        ok = ok and rep["consistent"]
    out.append(Check(8, "toeplitz/carleson agreement beta=1", ok, {"rows": rows}))
    z0 = toeplitz_equivalence_check(ToeplitzSpec(zero_measure(1), TOEPLITZ_BETA))
    out.append(Check(8, "toeplitz zero measure", z0["consistent"] and z0["operator_estimate"] == 0.0, {}))
    rng = np.random.default_rng(seed)
    for n in (1, 2):
        for beta in (0.0, 1.0):
            spec = ToeplitzSpec(weighted_volume(beta, n), beta, n=n)
            z = (rng.normal(size=(64, n)) + 1j * rng.normal(size=(64, n)))
            z = 0.95 * z / np.sqrt(norm2(z))[:, None] * rng.uniform(0, 1, 64)[:, None]
            err = max(float(np.max(np.abs(toeplitz_apply(spec, monomial(k), z) - monomial(k)(z))))
                      for k in range(7))
            out.append(Check(8, f"reproducing n={n} beta={beta:g}", err < REPRODUCE_TOL[n], {"max_error": err}))
    for name, mu in atomic_sets(1):
        spec = ToeplitzSpec(mu, TOEPLITZ_BETA)
        a = toeplitz_norm_estimate(spec, trials=8, seed=seed).value
        b = toeplitz_norm_estimate(spec.scaled(3.0), trials=8, seed=seed).value
        rel = abs(b - 3.0 * a) / (3.0 * a)
        out.append(Check(8, f"homogeneity {name}", rel < 1e-12, {"estimate": a, "estimate_3mu": b, "rel": rel}))
    return out


def suite_vanishing(seed: int = 0) -> list[Check]:
    out = []
    rows, ok = {}, True
    for name, mu in measure_battery(1):
        rep = toeplitz_compactness_probe(ToeplitzSpec(mu, TOEPLITZ_BETA))
        rows[name] = {"compact": rep["verdict"], "vanishing": rep["vanishing_probe"]}
        ok = ok and rep["consistent"]
    out.append(Check(9, "compactness/vanishing agreement beta=1", ok, {"rows": rows}))
    P = CarlesonParams(1.0, 0.0, 1)
    dv = RadialPower(0.0)
    c = classify_ball(dv, P).verdict
    v = vanishing_probe(dv, P).verdict
    t = toeplitz_compactness_probe(ToeplitzSpec(dv, 0.0))["verdict"]
    out.append(Check(9, "dv at threshold: carleson, not vanishing", c == "carleson" and v == "not_vanishing"
                     and t == "not_compact", {"carleson": c, "vanishing": v, "toeplitz": t}))
    above = {f"{th:g}": vanishing_probe(RadialPower(th), P).verdict for th in (0.25, 0.5, 1.0)}
    out.append(Check(9, "above threshold vanishing", all(x == "vanishing" for x in above.values()), above))
    return out


SECTION5_SYMBOLS = (("one", lambda: constant(1.0)), ("z", lambda: monomial(1)), ("zero", lambda: constant(0.0)),
                    ("g_log", g_log))
SECTION5_BETAS = (3.0, 2.0, 1.5)


def suite_section5(seed: int = 0) -> list[Check]:
    out = []
    pairs = [("z", monomial(1), "z^2", monomial(2)),
             ("g_log", g_log(), "kernel", kernel_test_function(np.array([0.5j]), 2.0)),
             ("kernel", kernel_test_function(np.array([0.6]), 1.5), "g_log", g_log())]
    for gn, g, fn, f in pairs:
        res = operator_identities(g, f, probes=1000, seed=seed)
        ok = max(res.values()) < IDENTITY_TOL
        out.append(Check(10, f"operator identities g={gn} f={fn}", ok, res))
    jz = cesaro_apply(monomial(1), constant(1.0), np.array([0.3 + 0.2j]))
    out.append(Check(10, "J_z 1 = z", abs(jz - (0.3 + 0.2j)) < 1e-12, {"value": [jz.real, jz.imag]}))
    lo, hi = FPQS_BRACKET
    for s in (1.5, 3.0):
        rows = fpqs_bloch_ratios(battery(n=1), 2.0, 0.0, s, n=1)
        ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
        zero_ok = all(r["fpqs"] == 0.0 for r in rows if r["ratio"] is None)
        ok = zero_ok and all(lo <= x <= hi for x in ratios)
        out.append(Check(10, f"F(p,q,s) vs Bloch bracket s={s:g}", ok,
                         {"min": min(ratios), "max": max(ratios), "rows": rows}))
    for s in (1.5, 3.0):
        for beta in SECTION5_BETAS:
            rows, ok = {}, True
            for gn, make in SECTION5_SYMBOLS:
                g = make()
                reps = {"J": jg_boundedness_check(g, 2.0, 0.0, 2.0, beta, s),
                        "I": ig_trichotomy_check(g, 2.0, 0.0, 2.0, beta, s),
                        "M": mg_trichotomy_check(g, 2.0, 0.0, 2.0, beta, s)}
                rows[gn] = {k: {"operator": r["operator_verdict"], "symbol": r["symbol_verdict"],
                                "compact_operator": r["compact_operator"], "compact_symbol": r["compact_symbol"]}
                            for k, r in reps.items()}
                ok = ok and all(r["consistent"] and r["compact_consistent"] for r in reps.values())
            out.append(Check(10, f"J/I/M consistency beta={beta:g} s={s:g}", ok, {"rows": rows}))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "geometry": suite_geometry,
    "quadrature": suite_quadrature,
    "lattice": suite_lattice,
    "theoremA": suite_theoremA,
    "theoremB": suite_theoremB,
    "theorem11": suite_theorem11,
    "toeplitz": suite_toeplitz,
    "vanishing": suite_vanishing,
    "section5": suite_section5,
}


@dataclass
class SuiteResult:
    name: str
    checks: list
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_suite(name: str, seed: int = 0, echo: Callable[[str], None] | None = None) -> list[SuiteResult]:
    """Run one suite (or every suite for ``all``); ``echo`` receives one line per check."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    results = []
    for nm in names:
        t0 = time.perf_counter()
        checks = SUITES[nm](seed=seed)
        res = SuiteResult(nm, checks, time.perf_counter() - t0)
        if echo is not None:
            for c in checks:
                echo(f"[{'PASS' if c.passed else 'FAIL'}] {nm}: {c.name}")
            echo(f"suite {nm}: {'pass' if res.passed else 'fail'} ({res.seconds:.1f} s)")
        results.append(res)
    return results


def summary(results: list[SuiteResult], seed: int) -> dict:
    """Machine-readable summary without timings."""
    return {"summary_version": SUMMARY_VERSION, "seed": seed,
            "passed": all(r.passed for r in results),
            "suites": {r.name: {"passed": r.passed, "checks": [c.to_dict() for c in r.checks]} for r in results}}


def summary_json(results: list[SuiteResult], seed: int) -> str:
    return to_json(summary(results, seed))
