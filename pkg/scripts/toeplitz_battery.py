"""Toeplitz boundedness and compactness verdicts next to the Carleson verdicts on the measure battery.

    python scripts/toeplitz_battery.py --beta 1 --trials 8
"""

import argparse
import dataclasses

from carleson_lab.batteries import measure_battery
from carleson_lab.operators import ToeplitzSpec, toeplitz_compactness_probe, toeplitz_equivalence_check


@dataclasses.dataclass
class BatteryConfig:
    beta: float = 1.0
    n: int = 1
    trials: int = 8
    seed: int = 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(BatteryConfig):
        ap.add_argument(f"--{f.name}", type=type(f.default), default=f.default)
    cfg = BatteryConfig(**vars(ap.parse_args()))
    print(f"{'measure':<22}{'operator':>11}{'carleson':>14}{'ratio':>9}{'compact':>13}{'vanishing':>15}")
    for name, mu in measure_battery(cfg.n):
        spec = ToeplitzSpec(mu, cfg.beta, n=cfg.n)
        eq = toeplitz_equivalence_check(spec, trials=cfg.trials, seed=cfg.seed)
        cp = toeplitz_compactness_probe(spec)
        ratio = eq.get("ratio")
        rtxt = f"{ratio:9.3f}" if isinstance(ratio, float) else f"{'-':>9}"
        print(f"{name:<22}{eq['operator_verdict']:>11}{eq['carleson_verdict']:>14}{rtxt}"
              f"{cp['verdict']:>13}{cp['vanishing_probe']:>15}")


if __name__ == "__main__":
    main()
