#!/usr/bin/env python3
"""Stroboscopic phase portraits around both resonant chains.

One CSV per (kick period, kick strength) panel: kick period 8 shows
the 1:1 chain emerging on the resonant torus as the kick grows, kick
period 4 the 2:1 chain and the onset of the mixed regime. Seeds cover
the full section; points are (seed, iterate, phi, z) rows.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from kicked_lmg.cli import main

PANELS = {
    "tau8": (8.0, (0.0005, 0.005, 0.01)),
    "tau4": (4.0, (0.002, 0.02, 0.1)),
}


def seed_grid():
    # four section columns, nine latitudes each; enough to fill both
    # the rotational region and the island chains
    seeds = []
    for phi in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2):
        for z in np.linspace(-0.95, 0.95, 9):
            seeds.append([float(phi), float(z)])
    return seeds


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/poincare_gallery")
    ap.add_argument("--n-iter", type=int, default=400, help="iterates per seed")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    seeds = seed_grid()
    for name, (tau, epsilons) in PANELS.items():
        out = Path(args.out) / name
        out.mkdir(parents=True, exist_ok=True)
        cfg = out / "run.yaml"
        cfg.write_text(
            yaml.safe_dump(
                {
                    "poincare": {
                        "seeds": seeds,
                        "taus": [tau],
                        "epsilons": list(epsilons),
                        "n_iter": args.n_iter,
                    }
                },
                sort_keys=False,
            )
        )
        code = main(
            ["poincare", "--config", str(cfg), "--out", str(out), "--workers", str(args.workers)]
        )
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
