"""Command-line entry point: ``extremal <word|gen|verify|approx|transport> ...``.

Exit status: 0 on success, 1 when an exact identity fails, 2 on usage errors.
Data files never contain timestamps; wall time goes to a ``.log`` sidecar.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import cubic, extremality
from .exact import Mat2
from .realnum import DEFAULT_BITS, BallReal, CFExpansion, cf_from_ball, eval_cf, transport_real
from .sequences import (
    IdentityError,
    SeedError,
    SeedSpec,
    eta_matrix,
    fibonacci_word,
    generate,
    transport,
    verify_all,
)

log = logging.getLogger("extremal")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: Optional[str] = None
    K: int = 12
    bits: int = DEFAULT_BITS
    hmax: int = 100
    window: int = 2
    jobs: int = 1
    X: list[int] = field(default_factory=lambda: [100, 1000, 10000])
    n: int = 13
    a: str = "a"
    b: str = "b"
    m: int = 1
    out: Optional[str] = None
    format: str = "json"

    def validate(self) -> None:
        for name in ("K", "bits", "hmax", "window", "jobs", "n", "m"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if any(x < 1 for x in self.X):
            raise UsageError("X values must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.command in ("gen", "verify", "approx") and not self.seed:
            raise UsageError(f"{self.command} needs --seed")


def _emit(cfg: RunConfig, outputs: dict[str, str], wall: Optional[float] = None) -> None:
    """Write {suffix: text}; without --out print the one matching --format."""
    if cfg.out is None:
        text = outputs.get(cfg.format) or next(iter(outputs.values()))
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    base = Path(cfg.out)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    for suffix, text in outputs.items():
        path = base.with_suffix("." + suffix)
        path.write_text(text if text.endswith("\n") else text + "\n")
    if wall is not None:
        base.with_suffix(".log").write_text(f"wall_time_s {wall:.3f}\n")


def _cmd_word(cfg: RunConfig) -> int:
    w = fibonacci_word(cfg.n, cfg.a, cfg.b)
    _emit(cfg, {"json": json.dumps({"n": cfg.n, "word": w}), "csv": ",".join(map(str, w))})
    return 0


def _seq_csv(seq) -> str:
    lines = ["k,x0,x1,x2,det2"]
    for k, p in enumerate(seq.points, start=1):
        lines.append(f"{k},{p.x0},{p.x1},{p.x2},{p.det()}")
    return "\n".join(lines)


def _cmd_gen(cfg: RunConfig) -> int:
    seed = SeedSpec.parse(cfg.seed)
    seq = generate(seed, cfg.K)
    if cfg.K >= 4:
        verify_all(seq)
    _emit(cfg, {"json": seq.to_json(), "csv": _seq_csv(seq)})
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    import time

    t0 = time.perf_counter()
    seed = SeedSpec.parse(cfg.seed)
    if cfg.K < 10:
        raise UsageError("verify needs --k >= 10")
    seq, rep = extremality.analyze(seed, cfg.K, cfg.bits)
    verify_all(seq)
    thetas = extremality.theta_estimates(rep)
    floor = extremality.cube_floor_check(rep)
    brute = [extremality.simul_approx_bruteforce(rep.xi, X, cfg.jobs) for X in cfg.X]
    summary = extremality.summary_json(rep, thetas, floor, brute)
    _emit(cfg, {"csv": rep.to_csv(), "json": summary}, time.perf_counter() - t0)
    return 0


def _cmd_approx(cfg: RunConfig) -> int:
    seed = SeedSpec.parse(cfg.seed)
    bits = max(cfg.bits, 64)
    xi = extremality.xi_for_seed(seed, bits)
    res = cubic.best_records(xi, cfg.hmax, cfg.window, cfg.jobs)
    _emit(cfg, {"csv": res.to_csv(), "json": res.to_json()}, res.wall_time)
    return 0


def transport_pipeline(m: int, K: int = 12, bits: int = 256, n_quotients: int = 20) -> dict:
    """fib(m, m+2) carried by C = ((0, -1), (-1, m + 1)) into the class with M = ((1, 1), (-1, 0))."""
    base = generate(SeedSpec.fibonacci(m, m + 2), K)
    C = eta_matrix(m)
    moved = transport(base, C)
    verify_all(moved)
    target = Fraction(1, 1 << bits)
    n = int(bits * 1.5) + 16
    xi = eval_cf(CFExpansion.fibonacci(m, m + 2, n), target, bits)
    eta_cf = eval_cf(CFExpansion.eta(m, n), target, bits)
    eta_formula = (BallReal.exact(m + 1, bits) + xi).reciprocal()
    eta_moved = transport_real(xi, C)
    expected = list(CFExpansion.eta(m, n_quotients).quotients[:n_quotients])
    recovered = cf_from_ball(eta_moved, n_quotients)
    return {
        "m": m,
        "C": C.as_rows(),
        "M_base": base.M.as_rows(),
        "M_transported": moved.M.as_rows(),
        "matrix_ok": moved.M == Mat2(1, 1, -1, 0),
        "points": [[str(c) for c in p] for p in moved.points],
        "eta_cf": eta_cf.to_json(),
        "eta_formula": eta_formula.to_json(),
        "eta_agree": eta_cf.overlaps(eta_formula) and eta_cf.overlaps(eta_moved),
        "cf_expected": expected,
        "cf_recovered": recovered,
        "cf_ok": recovered == expected,
    }


def _cmd_transport(cfg: RunConfig) -> int:
    doc = transport_pipeline(cfg.m, max(cfg.K, 4), cfg.bits)
    _emit(cfg, {"json": json.dumps(doc, indent=1, sort_keys=True)})
    return 0


COMMANDS = {
    "word": _cmd_word,
    "gen": _cmd_gen,
    "verify": _cmd_verify,
    "approx": _cmd_approx,
    "transport": _cmd_transport,
}


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except IdentityError as e:
        log.error("identity check failed: %s", e)
        return 1
    except (UsageError, SeedError) as e:
        log.error("usage: %s", e)
        return 2
    except OSError as e:
        log.error("cannot write output: %s", e)
        return 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extremal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", required=True, help="ea:<a> | fib:<a>,<b> | eta:<m>")
        p.add_argument("--out", help="output path (suffix chosen per file)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--bits", type=int, default=DEFAULT_BITS)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("word", help="Fibonacci word prefix")
    p.add_argument("--n", type=int, default=13)
    p.add_argument("--a", default="a")
    p.add_argument("--b", default="b")
    common(p, seed=False)

    p = sub.add_parser("gen", help="generate a point sequence and check exact identities")
    p.add_argument("--k", dest="K", type=int, default=12)
    common(p)

    p = sub.add_parser("verify", help="per-k report, theta limits, floors, brute force")
    p.add_argument("--k", dest="K", type=int, default=14)
    p.add_argument("--X", type=lambda s: [int(float(v)) for v in s.split(",")],
                   default=[100, 1000, 10000])
    common(p)

    p = sub.add_parser("approx", help="best approximations by algebraic integers of degree <= 3")
    p.add_argument("--hmax", type=int, default=100)
    p.add_argument("--window", type=int, default=2)
    common(p)

    p = sub.add_parser("transport", help="fib(m, m+2) -> eta(m) pipeline")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--k", dest="K", type=int, default=12)
    common(p, seed=False)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
