#!/usr/bin/env python3
"""Scaling of the resonance-assisted validity edge with spin size.

One sweep per chain across several spin sizes sharing a single
classical chain table: per-J quantum splittings, the crossing of the
two splitting predictions, and fits.json with the strength law and
the edge-versus-spin slope (near -2 for the 1:1 chain and -1 for the
2:1 chain). The chain extractions dominate the runtime.
"""

import argparse
import sys
from pathlib import Path

import yaml

from kicked_lmg.cli import main

J_DEFAULT = (60, 90, 150, 300)

CHAINS = {
    "one_to_one": {
        "resonance": {"r": 1, "s": 1},
        "eps_grid": {"start": 5.76e-6, "stop": 1.0e-2, "points_per_decade": 2},
    },
    "two_to_one": {
        "resonance": {"r": 2, "s": 1},
        "eps_grid": {"start": 1.0e-2, "stop": 0.12, "points_per_decade": 6},
    },
}


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/validity_scaling")
    ap.add_argument(
        "--j", dest="j_list", type=float, nargs="+", default=list(J_DEFAULT),
        help="spin sizes entering the edge fit",
    )
    ap.add_argument("--resume", action="store_true", help="keep finished spin sizes")
    args = ap.parse_args(argv)

    for name, spec in CHAINS.items():
        out = Path(args.out) / name
        out.mkdir(parents=True, exist_ok=True)
        cfg = out / "run.yaml"
        cfg.write_text(
            yaml.safe_dump(
                {
                    "model": {"J_list": args.j_list},
                    "resonance": spec["resonance"],
                    "drive": {"eps_grid": spec["eps_grid"]},
                },
                sort_keys=False,
            )
        )
        cli_args = ["sweep", "--config", str(cfg), "--out", str(out)]
        if args.resume:
            cli_args.append("--resume")
        code = main(cli_args)
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
