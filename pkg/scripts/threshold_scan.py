"""Scan RadialPower(theta) across the Carleson threshold and print every route's verdict.

    python scripts/threshold_scan.py --lam 1.5 --gamma 0.5 --width 0.5 --steps 11
"""

from __future__ import annotations

import argparse
import dataclasses
import json

import numpy as np

from carleson_lab.carleson import CarlesonParams, classify_ball, classify_berezin, classify_lattice
from carleson_lab.measures import RadialPower


@dataclasses.dataclass
class ScanConfig:
    lam: float = 1.0
    gamma: float = 0.0
    n: int = 1
    width: float = 0.5
    steps: int = 11


def scan(cfg: ScanConfig) -> list[dict]:
    P = CarlesonParams(cfg.lam, cfg.gamma, cfg.n)
    routes = {"ball": classify_ball, "berezin": classify_berezin} if P.lam >= 1 else {
        "lattice": classify_lattice, "berezin": classify_berezin}
    rows = []
    for theta in np.linspace(P.threshold - cfg.width, P.threshold + cfg.width, cfg.steps):
        if theta <= -1:
            continue
        mu = RadialPower(float(theta))
        row = {"theta": round(float(theta), 6)}
        for name, route in routes.items():
            rep = route(mu, P)
            row[name] = rep.verdict
            row[f"{name}_norm"] = rep.norm_estimate
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(ScanConfig):
        ap.add_argument(f"--{f.name}", type=type(f.default), default=f.default)
    cfg = ScanConfig(**vars(ap.parse_args()))
    P = CarlesonParams(cfg.lam, cfg.gamma, cfg.n)
    print(f"# threshold theta* = {P.threshold:g}")
    for row in scan(cfg):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
