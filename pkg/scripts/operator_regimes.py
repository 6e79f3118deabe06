"""J_g, I_g and M_g verdicts for a few symbols across the three beta regimes.

    python scripts/operator_regimes.py --s 1.5
"""

import argparse
import dataclasses

from carleson_lab.operators import ig_trichotomy_check, jg_boundedness_check, mg_trichotomy_check
from carleson_lab.operators import HypothesisError
from carleson_lab.spaces import constant, g_log, monomial


@dataclasses.dataclass
class RegimeConfig:
    t: float = 2.0
    alpha: float = 0.0
    p: float = 2.0
    s: float = 1.5
    betas: str = "3,2,1.5"


SYMBOLS = {"one": constant(1.0), "z": monomial(1), "zero": constant(0.0), "g_log": g_log()}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(RegimeConfig):
        ap.add_argument(f"--{f.name}", type=type(f.default), default=f.default)
    cfg = RegimeConfig(**vars(ap.parse_args()))
    for beta in (float(b) for b in cfg.betas.split(",")):
        for name, g in SYMBOLS.items():
            row = [f"beta={beta:<4g}", f"g={name:<6}"]
            for label, check in (("J", jg_boundedness_check), ("I", ig_trichotomy_check),
                                 ("M", mg_trichotomy_check)):
                try:
                    rep = check(g, cfg.t, cfg.alpha, cfg.p, beta, cfg.s)
                except HypothesisError:
                    row.append(f"{label}: n/a")
                    continue
                mark = "ok" if rep["consistent"] and rep["compact_consistent"] else "MISMATCH"
                row.append(f"{label}: {rep['operator_verdict']:<9} [{mark}]")
            print("  ".join(row))


if __name__ == "__main__":
    main()
