"""Command-line entry point: ``carleson-lab <command> [options]``.

Exit codes: 0 for positive verdicts (carleson, consistent, vanishing, pass),
1 for negative verdicts, 2 for inconclusive results, 3 for input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import parallel
from .carleson import (CarlesonParams, carleson_norm, classify_ball, classify_berezin, classify_lattice,
                       default_lattice_for, derive_params, key_lemma_check, product_inequality_check, reports_to_csv,
                       to_json, vanishing_probe)
from .geometry import DomainError, bergman_dist, mobius, one_minus_mobius_sq, pseudo_hyperbolic
from .lattice import Lattice, build_lattice, packing_overlap_bound, verify_lattice
from .measures import Measure, measure_from_dict, parse_measure_shorthand
from .operators import (HypothesisError, ToeplitzSpec, cesaro_apply, companion_apply, ig_trichotomy_check,
                        jg_boundedness_check, mg_trichotomy_check, multiplier_apply, toeplitz_compactness_probe,
                        toeplitz_equivalence_check, toeplitz_norm_estimate)
from .quadrature import DEFAULT, QuadConfig
from .spaces import boundary_power, constant, g_log, monomial
from .verify import PRODUCT_BRACKET, SUITES, run_suite, summary_json

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3

COMMANDS = ("geometry", "lattice", "classify", "norm", "vanishing", "toeplitz", "product", "keylemma", "cesaro",
            "verify")

_POSITIVE = {"carleson", "consistent", "bounded", "compact", "vanishing", "pass", "ok"}
_NEGATIVE = {"not_carleson", "inconsistent", "unbounded", "not_compact", "not_vanishing", "fail"}


class InputError(Exception):
    """Bad user input; reported with exit code 3."""


@dataclass
class RunConfig:
    """Everything a run depends on; loaded from ``--config`` and overridden by flags."""

    command: str = ""
    measure: object = None
    params: dict = field(default_factory=dict)
    quad: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=dict)
    seed: int = 0
    format: str = "json"
    output: str | None = None
    threads: int | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise InputError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise InputError(f"unknown config keys {sorted(extra)}; allowed: {sorted(known)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.command and self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise InputError("format must be 'json' or 'csv'")
        for name in ("params", "quad", "lattice", "options"):
            if not isinstance(getattr(self, name), dict):
                raise InputError(f"{name} must be an object")
        extra = set(self.params) - {"lambda", "gamma", "tuples", "n"}
        if extra:
            raise InputError(f"unknown params keys {sorted(extra)}")
        extra = set(self.lattice) - {"r", "truncation"}
        if extra:
            raise InputError(f"unknown lattice keys {sorted(extra)}")
        if not isinstance(self.seed, int):
            raise InputError("seed must be an integer")

    def quad_config(self) -> QuadConfig:
        try:
            return QuadConfig.from_dict(self.quad) if self.quad else DEFAULT
        except (TypeError, ValueError) as e:
            raise InputError(str(e)) from None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# ------------------------------------------------------------------ input helpers


def load_json(path: str):
    """Parse a JSON file; syntax errors name the line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def load_measure(spec) -> Measure:
    """A measure from an inline dict, a JSON file path or a shorthand string."""
    if spec is None:
        raise InputError("a measure is required (--measure)")
    try:
        if isinstance(spec, dict):
            return measure_from_dict(spec)
        if isinstance(spec, str) and (spec.endswith(".json") or os.path.sep in spec):
            return measure_from_dict(load_json(spec))
        return parse_measure_shorthand(str(spec))
    except InputError:
        raise
    except (ValueError, KeyError, TypeError, DomainError) as e:
        raise InputError(f"invalid measure: {e}") from None


def _parse_complex_vector(text: str) -> np.ndarray:
    try:
        return np.array([complex(c.strip().replace(" ", "")) for c in text.split(",")], dtype=complex)
    except ValueError:
        raise InputError(f"cannot parse point {text!r}; use comma-separated complex numbers like 0.5,0.1+0.2j") from None


def _parse_tuples(text) -> list:
    if isinstance(text, list):
        return text
    try:
        return [[float(x) for x in part.split(",")] for part in text.split(";") if part.strip()]
    except ValueError:
        raise InputError(f"cannot parse tuples {text!r}; use p,q,alpha;p,q,alpha") from None


def carleson_params(cfg: RunConfig) -> CarlesonParams:
    p = cfg.params
    n = int(p.get("n", 1))
    try:
        if p.get("tuples"):
            return derive_params(_parse_tuples(p["tuples"]), n)
        if "lambda" in p and "gamma" in p:
            return CarlesonParams(float(p["lambda"]), float(p["gamma"]), n)
    except ValueError as e:
        raise InputError(str(e)) from None
    raise InputError("give --lambda and --gamma, or --tuples")


def symbol_from_text(text: str):
    """``one``, ``zero``, ``z``, ``g_log``, ``monomial:k``, ``boundary_power:sigma``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "one":
            return constant(1.0)
        if kind == "zero":
            return constant(0.0)
        if kind == "z":
            return monomial(1)
        if kind == "g_log":
            return g_log()
        if kind == "monomial":
            return monomial(int(arg))
        if kind == "boundary_power":
            return boundary_power(float(arg))
    except ValueError as e:
        raise InputError(str(e)) from None
    raise InputError(f"unknown function {text!r}")


# ------------------------------------------------------------------ output


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory and rename it into place."""
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _trend_csv(rows_from: list[dict]) -> str:
    import csv
    import io
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["probe_id", "radius", "value", "slope", "verdict"], lineterminator="\n")
    w.writeheader()
    for tr in rows_from:
        for i, (r, v) in enumerate(zip(tr.get("radii", []), tr.get("values", []))):
            w.writerow({"probe_id": i, "radius": r, "value": v, "slope": tr.get("slope"), "verdict": tr.get("verdict")})
    return buf.getvalue()


def emit(cfg: RunConfig, report: dict, csv_text: str | None) -> None:
    if cfg.format == "csv":
        if csv_text is None:
            raise InputError(f"command {cfg.command!r} has no CSV form; use --format json")
        text = csv_text
    else:
        text = to_json(report)
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def verdict_code(verdict: str) -> int:
    if verdict in _POSITIVE:
        return EXIT_OK
    if verdict in _NEGATIVE:
        return EXIT_NEGATIVE
    return EXIT_INCONCLUSIVE


def _echo(cfg: RunConfig) -> dict:
    d = cfg.to_dict()
    d.pop("threads")  # results do not depend on it; keeps reports byte-identical across thread counts
    d["quad"] = cfg.quad_config().to_dict()
    return d


# ------------------------------------------------------------------ commands


def cmd_geometry(cfg: RunConfig):
    o = cfg.options
    if "a" not in o or "z" not in o:
        raise InputError("geometry needs --a and --z")
    a, z = _parse_complex_vector(o["a"]), _parse_complex_vector(o["z"])
    if a.shape != z.shape:
        raise InputError("a and z must have the same dimension")
    try:
        w = mobius(a, z)
    except DomainError as e:
        raise InputError(str(e)) from None
    lhs = 1.0 - float(np.sum(np.abs(w) ** 2))
    rhs = float(one_minus_mobius_sq(a, z))
    rep = {"a": [[x.real, x.imag] for x in a], "z": [[x.real, x.imag] for x in z],
           "phi_a_z": [[x.real, x.imag] for x in w], "pseudo_hyperbolic": float(pseudo_hyperbolic(a, z)),
           "bergman_distance": float(bergman_dist(a, z)), "identity_residual": abs(lhs - rhs)}
    return rep, None, EXIT_OK


def _lattice_from(cfg: RunConfig, n: int) -> Lattice:
    lc = cfg.lattice
    if not lc:
        return default_lattice_for(n)
    try:
        return build_lattice(float(lc.get("r", 0.25)), n, float(lc.get("truncation", 1e-3)), seed=cfg.seed)
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_lattice(cfg: RunConfig):
    n = int(cfg.params.get("n", 1))
    r = float(cfg.lattice.get("r", 0.5))
    tr = float(cfg.lattice.get("truncation", 1e-2))
    try:
        lat = build_lattice(r, n, tr, seed=cfg.seed)
    except ValueError as e:
        raise InputError(str(e)) from None
    rep = verify_lattice(lat, int(cfg.options.get("probes", 10_000)), seed=cfg.seed)
    rep["overlap_bound"] = packing_overlap_bound(n, r, r / 2)
    rep["lattice"] = {"r": r, "truncation": tr, "n": n}
    if cfg.options.get("points"):
        rep["points_list"] = [[[x.real, x.imag] for x in p] for p in lat.points]
    ok = rep["covering_misses"] == 0 and rep["separation_ok"] and rep["max_overlap"] <= rep["overlap_bound"]
    return rep, None, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_classify(cfg: RunConfig):
    mu, P, q = load_measure(cfg.measure), carleson_params(cfg), cfg.quad_config()
    route = cfg.options.get("route", "auto")
    if route == "auto":
        route = "ball" if P.lam >= 1 else "lattice"
    try:
        if route == "ball":
            rep = classify_ball(mu, P, cfg=q)
        elif route == "berezin":
            rep = classify_berezin(mu, P, cfg=q)
        elif route == "lattice":
            rep = classify_lattice(mu, P, _lattice_from(cfg, P.n), q)
        else:
            raise InputError(f"unknown route {route!r}")
    except ValueError as e:
        raise InputError(str(e)) from None
    d = rep.to_dict()
    d["run"] = _echo(cfg)
    return d, reports_to_csv([rep]), verdict_code(rep.verdict)


def cmd_norm(cfg: RunConfig):
    mu, P, q = load_measure(cfg.measure), carleson_params(cfg), cfg.quad_config()
    lat = _lattice_from(cfg, P.n) if P.lam < 1 else None
    rep = carleson_norm(mu, P, q, lat=lat)
    rep["run"] = _echo(cfg)
    return rep, _trend_csv([r["trend"] for r in rep["routes"].values()]), verdict_code(rep["verdict"])


def cmd_vanishing(cfg: RunConfig):
    mu, P, q = load_measure(cfg.measure), carleson_params(cfg), cfg.quad_config()
    tr = vanishing_probe(mu, P, cfg=q).to_dict()
    rep = {"params": P.to_dict(), "trend": tr, "verdict": tr["verdict"], "run": _echo(cfg)}
    return rep, _trend_csv([tr]), verdict_code(tr["verdict"])


def _toeplitz_spec(cfg: RunConfig) -> ToeplitzSpec:
    o = cfg.options
    try:
        return ToeplitzSpec(load_measure(cfg.measure), float(o.get("beta", 0.0)), float(o.get("p1", 2.0)),
                            float(o.get("alpha1", 0.0)), float(o.get("p2", 2.0)), float(o.get("alpha2", 0.0)),
                            int(cfg.params.get("n", 1)))
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_toeplitz(cfg: RunConfig):
    spec, q = _toeplitz_spec(cfg), cfg.quad_config()
    mode = cfg.options.get("mode", "equivalence")
    if mode == "equivalence":
        rep = toeplitz_equivalence_check(spec, q, trials=int(cfg.options.get("trials", 8)), seed=cfg.seed)
        code = EXIT_OK if rep["consistent"] else EXIT_NEGATIVE
        if rep["carleson_verdict"] == "inconclusive":
            code = EXIT_INCONCLUSIVE
        csv_text = _trend_csv([rep["trend"]]) if rep.get("trend") else None
    elif mode == "compactness":
        rep = toeplitz_compactness_probe(spec, q)
        code = verdict_code(rep["verdict"])
        csv_text = _trend_csv([rep["trend"]])
    elif mode == "estimate":
        spec.check()
        est = toeplitz_norm_estimate(spec, trials=int(cfg.options.get("trials", 64)), seed=cfg.seed, cfg=q)
        rep, code, csv_text = {"spec": spec.to_dict(), "estimate": est.to_dict()}, EXIT_OK, None
    else:
        raise InputError(f"unknown toeplitz mode {mode!r}")
    rep["run"] = _echo(cfg)
    return rep, csv_text, code


def cmd_product(cfg: RunConfig):
    mu, q = load_measure(cfg.measure), cfg.quad_config()
    tuples = _parse_tuples(cfg.params.get("tuples") or "")
    if not tuples:
        raise InputError("product needs --tuples p,q,alpha;...")
    try:
        rep = product_inequality_check(mu, tuples, n=int(cfg.params.get("n", 1)),
                                       trials=int(cfg.options.get("trials", 64)), seed=cfg.seed, cfg=q)
    except ValueError as e:
        raise InputError(str(e)) from None
    lo, hi = PRODUCT_BRACKET
    ok = (rep["C_est"] == 0 and rep["carleson_norm"] == 0) or (
        isinstance(rep["ratio"], float) and lo <= rep["ratio"] <= hi)
    rep["bracket"] = [lo, hi]
    rep["run"] = _echo(cfg)
    return rep, None, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_keylemma(cfg: RunConfig):
    mu = load_measure(cfg.measure)
    o = cfg.options
    try:
        rep = key_lemma_check(mu, float(o.get("p", 2.0)), float(o.get("q", 2.0)), float(o.get("r", 1.0)),
                              float(o.get("alpha1", 0.0)), float(o.get("alpha2", 0.0)), n=int(cfg.params.get("n", 1)))
    except ValueError as e:
        raise InputError(str(e)) from None
    lo, hi = PRODUCT_BRACKET
    ratio = rep["ratio"]
    ok = (rep["K_est"] == 0 and rep["carleson_norm"] == 0) or (isinstance(ratio, float) and lo <= ratio <= hi)
    rep["bracket"] = [lo, hi]
    rep["run"] = _echo(cfg)
    return rep, None, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_cesaro(cfg: RunConfig):
    o = cfg.options
    g = symbol_from_text(o.get("g", "z"))
    op = o.get("op", "J")
    if o.get("z") is not None:
        f = symbol_from_text(o.get("f", "one"))
        z = _parse_complex_vector(o["z"])
        fn = {"J": cesaro_apply, "I": companion_apply}.get(op)
        try:
            val = fn(g, f, z) if fn else multiplier_apply(g, f, z)
        except ValueError as e:
            raise InputError(str(e)) from None
        return {"op": op, "g": g.descriptor, "f": f.descriptor, "z": [[x.real, x.imag] for x in z],
                "value": [val.real, val.imag]}, None, EXIT_OK
    args = (g, float(o.get("t", 2.0)), float(o.get("alpha", 0.0)), float(o.get("p", 2.0)), float(o.get("beta", 2.0)),
            float(o.get("s", 1.5)))
    check = {"J": jg_boundedness_check, "I": ig_trichotomy_check, "M": mg_trichotomy_check}.get(op)
    if check is None:
        raise InputError(f"unknown operator {op!r}; choose J, I or M")
    rep = check(*args, cfg.quad_config(), n=int(cfg.params.get("n", 1)))
    rep["run"] = _echo(cfg)
    return rep, _trend_csv([rep["operator_trend"]]), EXIT_OK if rep["consistent"] else EXIT_NEGATIVE


def cmd_verify(cfg: RunConfig):
    suite = cfg.options.get("suite", "all")
    if suite != "all" and suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {sorted(SUITES) + ['all']}")
    results = run_suite(suite, seed=cfg.seed, echo=lambda line: print(line, file=sys.stderr, flush=True))
    text = summary_json(results, cfg.seed)
    ok = all(r.passed for r in results)
    return json.loads(text), None, EXIT_OK if ok else EXIT_NEGATIVE


HANDLERS = {"geometry": cmd_geometry, "lattice": cmd_lattice, "classify": cmd_classify, "norm": cmd_norm,
            "vanishing": cmd_vanishing, "toeplitz": cmd_toeplitz, "product": cmd_product, "keylemma": cmd_keylemma,
            "cesaro": cmd_cesaro, "verify": cmd_verify}


# ------------------------------------------------------------------ argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carleson-lab", description="Bergman-Carleson measure diagnostics.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", "-o", help="write the report here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help=f"worker threads (overrides ${parallel.ENV_VAR})")
    common.add_argument("--quad", help="QuadConfig overrides as a JSON object")
    common.add_argument("--n", type=int, help="complex dimension")
    meas = argparse.ArgumentParser(add_help=False)
    meas.add_argument("--measure", help="shorthand (radial_power:0, atom:0.5@1, zero) or a JSON file")
    prm = argparse.ArgumentParser(add_help=False)
    prm.add_argument("--lambda", dest="lam", type=float)
    prm.add_argument("--gamma", type=float)
    prm.add_argument("--tuples", help="p,q,alpha;p,q,alpha")
    lat = argparse.ArgumentParser(add_help=False)
    lat.add_argument("--lattice-r", type=float)
    lat.add_argument("--truncation", type=float)

    sub = ap.add_subparsers(dest="command", required=True)
    g = sub.add_parser("geometry", parents=[common], help="Mobius map and distances")
    g.add_argument("--a")
    g.add_argument("--z")
    lt = sub.add_parser("lattice", parents=[common, lat], help="build and verify an r-lattice")
    lt.add_argument("--probes", type=int)
    lt.add_argument("--points", action="store_true", help="include the lattice points in the report")
    c = sub.add_parser("classify", parents=[common, meas, prm, lat], help="Carleson verdict by one route")
    c.add_argument("--route", choices=("auto", "ball", "berezin", "lattice"))
    sub.add_parser("norm", parents=[common, meas, prm, lat], help="norm estimate with cross-route evidence")
    sub.add_parser("vanishing", parents=[common, meas, prm], help="vanishing-Carleson trend")
    t = sub.add_parser("toeplitz", parents=[common, meas], help="Toeplitz operator checks")
    t.add_argument("--mode", choices=("equivalence", "compactness", "estimate"))
    for name in ("beta", "p1", "alpha1", "p2", "alpha2"):
        t.add_argument(f"--{name}", type=float)
    t.add_argument("--trials", type=int)
    p = sub.add_parser("product", parents=[common, meas, prm], help="product inequality constant")
    p.add_argument("--trials", type=int)
    k = sub.add_parser("keylemma", parents=[common, meas], help="S-operator bound")
    for name in ("p", "q", "r", "alpha1", "alpha2"):
        k.add_argument(f"--{name}", type=float)
    ce = sub.add_parser("cesaro", parents=[common], help="J_g, I_g, M_g values and boundedness checks")
    ce.add_argument("--g")
    ce.add_argument("--f")
    ce.add_argument("--op", choices=("J", "I", "M"))
    ce.add_argument("--z", help="evaluate the operator at this point instead of running the check")
    for name in ("t", "alpha", "p", "beta", "s"):
        ce.add_argument(f"--{name}", type=float)
    v = sub.add_parser("verify", parents=[common], help="acceptance suites")
    v.add_argument("suite", nargs="?", default=None, help=f"one of {sorted(SUITES) + ['all']}")
    return ap


_OPTION_KEYS = ("a", "z", "probes", "points", "route", "mode", "beta", "p1", "alpha1", "p2", "alpha2", "trials", "p",
                "q", "r", "g", "f", "op", "t", "alpha", "s", "suite")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = load_json(ns.config) if getattr(ns, "config", None) else {}
    if base.get("command") not in (None, ns.command):
        raise InputError(f"config is for command {base['command']!r}, not {ns.command!r}")
    base = dict(base, command=ns.command)
    cfg = RunConfig.from_dict(base)
    if ns.output is not None:
        cfg.output = ns.output
    if ns.format is not None:
        cfg.format = ns.format
    if ns.seed is not None:
        cfg.seed = ns.seed
    if ns.threads is not None:
        cfg.threads = ns.threads
    if ns.quad is not None:
        try:
            cfg.quad = dict(cfg.quad, **json.loads(ns.quad))
        except json.JSONDecodeError as e:
            raise InputError(f"--quad: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if ns.n is not None:
        cfg.params["n"] = ns.n
    if getattr(ns, "measure", None) is not None:
        cfg.measure = ns.measure
    if getattr(ns, "lam", None) is not None:
        cfg.params["lambda"] = ns.lam
    if getattr(ns, "gamma", None) is not None:
        cfg.params["gamma"] = ns.gamma
    if getattr(ns, "tuples", None) is not None:
        cfg.params["tuples"] = ns.tuples
    if getattr(ns, "lattice_r", None) is not None:
        cfg.lattice["r"] = ns.lattice_r
    if getattr(ns, "truncation", None) is not None:
        cfg.lattice["truncation"] = ns.truncation
    for key in _OPTION_KEYS:
        val = getattr(ns, key, None)
        if val is not None and val is not False:
            cfg.options[key] = val
    cfg.validate()
    return cfg


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; the contract reserves 2 for inconclusive verdicts
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        prev = parallel._override
        parallel.set_threads(cfg.threads)
        try:
            report, csv_text, code = HANDLERS[cfg.command](cfg)
        finally:
            parallel.set_threads(prev)
        emit(cfg, report, csv_text)
        return code
    except HypothesisError as e:
        print(f"error: hypothesis violated: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
