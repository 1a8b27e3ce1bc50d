"""Best simultaneous approximation min L_xi(x) for x0 <= X, normalized by X^(1/gamma).

    python3 scripts/bruteforce_table.py --seed ea:1 --X 100 1000 10000 100000
"""

import argparse
import sys
from dataclasses import dataclass, field

from extremal.extremality import simul_approx_bruteforce, xi_for_seed
from extremal.sequences import SeedSpec, generate


@dataclass
class BruteConfig:
    seed: str = "ea:1"
    X: list[int] = field(default_factory=lambda: [10**2, 10**3, 10**4, 10**5])
    bits: int = 256
    jobs: int = 4


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="ea:1")
    ap.add_argument("--X", nargs="+", type=int, default=BruteConfig().X)
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--jobs", type=int, default=4)
    cfg = BruteConfig(**vars(ap.parse_args(argv)))
    seed = SeedSpec.parse(cfg.seed)
    xi = xi_for_seed(seed, cfg.bits)
    seq_x0 = {p.x0: k for k, p in enumerate(generate(seed, 12).points, start=1)}
    sys.stdout.write("X,x0,x1,x2,L,normalized,sequence_k\n")
    for X in cfg.X:
        b = simul_approx_bruteforce(xi, X, cfg.jobs)
        k = seq_x0.get(b.point.x0, "")
        sys.stdout.write(f"{X},{b.point.x0},{b.point.x1},{b.point.x2},"
                         f"{float(b.value.mid):.6e},{b.normalized:.4f},{k}\n")


if __name__ == "__main__":
    main()
