"""Residue-class limits of {x_{k,2} xi} and the floor of {x_{k,0} xi^3} per seed.

    python3 scripts/theta_table.py --seeds ea:1 ea:2 ea:3 eta:1 --k 16
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from extremal.extremality import analyze, cube_floor_check, theta_estimates
from extremal.sequences import SeedSpec


@dataclass
class ThetaConfig:
    seeds: list[str] = field(default_factory=lambda: ["ea:1", "ea:2", "ea:3", "eta:1", "fib:1,2"])
    k: int = 16
    bits: int = 512


def rows(cfg: ThetaConfig):
    for label in cfg.seeds:
        _, rep = analyze(SeedSpec.parse(label), cfg.k, cfg.bits)
        floor = cube_floor_check(rep)
        for t in theta_estimates(rep):
            yield {
                "seed": label,
                "bits": rep.bits,
                "residue": t.residue,
                "theta": f"{float(t.limit.mid):.12f}",
                "spread": f"{t.spread:.3e}",
                "cauchy": t.cauchy,
                "max_decay": f"{max(t.decays):.4f}" if t.decays else "",
                "min_cube": f"{float(floor['min_cube'].mid):.8f}",
                "min_cube_k": floor["min_cube_k"],
            }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", nargs="+", default=ThetaConfig().seeds)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--bits", type=int, default=512)
    cfg = ThetaConfig(**vars(ap.parse_args(argv)))
    out = list(rows(cfg))
    w = csv.DictWriter(sys.stdout, fieldnames=list(out[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(out)


if __name__ == "__main__":
    main()
