"""Last-record exponent and min c1_stat against Hmax for a few seeds.

    python3 scripts/exponent_scan.py --seeds fib:1,2 ea:1 eta:1 --hmax 50 100 200 300
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from extremal.cubic import GAMMA2, best_records
from extremal.extremality import xi_for_seed
from extremal.sequences import SeedSpec


@dataclass
class ScanConfig:
    seeds: list[str] = field(default_factory=lambda: ["fib:1,2", "ea:1", "eta:1"])
    hmax: list[int] = field(default_factory=lambda: [50, 100, 200, 300])
    bits: int = 256
    jobs: int = 4


def scan(cfg: ScanConfig):
    for label in cfg.seeds:
        xi = xi_for_seed(SeedSpec.parse(label), cfg.bits)
        for H in cfg.hmax:
            res = best_records(xi, H, jobs=cfg.jobs)
            last = res.records[-1]
            yield {
                "seed": label,
                "Hmax": H,
                "records": len(res.records),
                "last_poly": str(last.poly),
                "last_H": last.height,
                "last_exponent": f"{last.exponent:.4f}",
                "gap_to_gamma2": f"{last.exponent - GAMMA2:+.4f}",
                "min_c1": f"{float(res.min_c1.c1_stat.mid):.4e}",
                "seconds": f"{res.wall_time:.1f}",
            }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", nargs="+", default=ScanConfig().seeds)
    ap.add_argument("--hmax", nargs="+", type=int, default=ScanConfig().hmax)
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--jobs", type=int, default=4)
    cfg = ScanConfig(**vars(ap.parse_args(argv)))
    w = None
    for row in scan(cfg):
        if w is None:
            w = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
            w.writeheader()
        w.writerow(row)
        sys.stdout.flush()


if __name__ == "__main__":
    main()
