"""Diagnostics along a point sequence: growth, approximation bands, and the
fractional parts {x_{k,2} xi} and {x_{k,0} xi^3}.

None of the constants involved is known in closed form, so every one is
reported as the empirical extremum of its normalized statistic.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import Point3, det2, det3
from .realnum import (
    MAX_BITS,
    BallReal,
    CFExpansion,
    PrecisionError,
    eval_cf,
    frac_dist,
    L_xi,
    log_abs,
    xi_from_points,
)
from .sequences import PointSeq, SeedSpec, generate

GAMMA = (1 + math.sqrt(5)) / 2
_POW_RELERR = Fraction(1, 10**9)  # headroom over libm error for X**e via exp/log


def real_power(X: int, e: float, prec: int) -> BallReal:
    """Ball around X**e computed in floating point with a relative error margin."""
    t = e * log_abs(X)
    n = math.floor(t / math.log(2))
    v = Fraction(math.exp(t - n * math.log(2))) * Fraction(2) ** n
    return BallReal.make(v, v * _POW_RELERR, True, prec)


@dataclass
class ReportRow:
    k: int
    point: Point3
    X: int
    growth: Optional[float]
    LX: BallReal
    L: BallReal
    det2: int
    det3: Optional[int]
    delta: BallReal
    cube: Optional[BallReal]
    floor: Optional[BallReal]
    decay: Optional[BallReal] = None


@dataclass
class SeqReport:
    label: str
    xi: BallReal
    rows: list[ReportRow]
    bits: int
    empirical: bool
    summary: dict = field(default_factory=dict)

    def row(self, k: int) -> ReportRow:
        return self.rows[k - 1]

    COLUMNS = ("k", "X", "log10_X", "growth", "LX", "det2", "det3",
               "delta", "cube", "decay", "floor")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([
                r.k,
                r.X if r.X < 10**30 else "",
                f"{log_abs(r.X) / math.log(10):.6f}",
                "" if r.growth is None else f"{r.growth:.9f}",
                r.LX.to_str(12),
                r.det2,
                "" if r.det3 is None else r.det3,
                r.delta.to_str(20),
                "" if r.cube is None else r.cube.to_str(20),
                "" if r.decay is None else r.decay.to_str(12),
                "" if r.floor is None else r.floor.to_str(12),
            ])
        return buf.getvalue()


def report(seq: PointSeq, xi: BallReal, k_start: int = 3) -> SeqReport:
    """Per-k diagnostic table.

    Raises ``PrecisionError`` when ``xi`` is too coarse to resolve L_xi(x_k) or
    the fractional parts for every k in the sequence.
    """
    if len(seq) < 7:
        raise ValueError("need at least 7 points")
    K = len(seq)
    xi2, xi3 = xi.square(), xi.cube()
    inv_g3 = 2 * GAMMA - 3  # 1/gamma^3
    rows = []
    for k in range(1, K + 1):
        x = seq.x(k)
        X = x.norm()
        nxt = seq.x(k + 1).norm() if k < K else None
        growth = log_abs(nxt) / log_abs(X) if nxt is not None and X > 1 else None
        L = L_xi(x, xi)
        if L.rad * 8 > L.mid:
            raise PrecisionError(f"xi too coarse to resolve L_xi(x_{k})")
        delta = frac_dist(xi * x.x2)
        cube = frac_dist(xi3 * x.x0) if x.x0 != 0 else None
        floor = cube * real_power(X, inv_g3, xi.prec) if cube is not None else None
        rows.append(ReportRow(
            k=k, point=x, X=X, growth=growth, LX=L * X, L=L, det2=det2(x),
            det3=det3(x, seq.x(k + 1), seq.x(k + 2)) if k + 2 <= K else None,
            delta=delta, cube=cube, floor=floor,
        ))
    for r in rows[:-3]:
        r.decay = abs(rows[r.k + 2].delta - r.delta) * r.X
    rep = SeqReport(seq.seed.label, xi, rows, xi.prec, not xi.certified)
    rep.summary = summarize(rep, k_start)
    return rep


def _float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def _band(balls):
    mids = [float(b.mid) for b in balls]
    return (min(mids), max(mids)) if mids else (None, None)


def summarize(rep: SeqReport, k_start: int = 3) -> dict:
    rows = [r for r in rep.rows if r.k >= k_start]
    lo, hi = _band([r.LX for r in rows])
    growth = [r.growth for r in rows if r.growth is not None]
    cubes = [r.cube for r in rows if r.cube is not None]
    floors = [r.floor for r in rows if r.floor is not None]
    decays = [r.decay for r in rows if r.decay is not None]
    return {
        "seed": rep.label,
        "bits": rep.bits,
        "empirical": rep.empirical,
        "k_range": [k_start, rep.rows[-1].k],
        "LX_band": [lo, hi],
        "LX_ratio": hi / lo if lo else None,
        "growth_last": growth[-1] if growth else None,
        "det2_values": sorted({r.det2 for r in rows}),
        "det3_values": sorted({r.det3 for r in rows if r.det3 is not None}),
        "c4_estimate": _float(min(c.mid for c in cubes)) if cubes else None,
        "c6_estimate": _float(min(f.mid for f in floors)) if floors else None,
        "c8_estimate": _float(max(d.mid for d in decays)) if decays else None,
        "domination_violations": len(domination_checks(rep, violations_only=True)),
    }


def _ineq(a: BallReal, b: BallReal) -> str:
    """Status of a <= b over balls: verified / consistent / violated."""
    if a.upper <= b.lower:
        return "verified"
    if a.lower <= b.upper:
        return "consistent"
    return "violated"


def domination_checks(rep: SeqReport, violations_only: bool = False) -> list[dict]:
    """{x0 xi} <= L, {x1 xi} <= (|xi|+1) L, |{x0 xi^3} - delta| <= |xi| L, per row."""
    xi = rep.xi
    axi = abs(xi)
    out = []
    for r in rep.rows:
        x = r.point
        checks = {
            "x0": _ineq(frac_dist(xi * x.x0), r.L),
            "x1": _ineq(frac_dist(xi * x.x1), (axi + 1) * r.L),
        }
        if r.cube is not None:
            checks["cube_delta"] = _ineq(abs(r.cube - r.delta), axi * r.L)
        for name, status in checks.items():
            if status == "violated" or not violations_only:
                out.append({"k": r.k, "check": name, "status": status})
    return out


@dataclass
class ThetaEstimate:
    residue: int
    estimates: list[BallReal]
    limit: BallReal
    spread: float
    steps: list[float]
    decays: list[float]
    cauchy: bool


def theta_estimates(rep: SeqReport, k_start: int = 3, strict: bool = False) -> list[ThetaEstimate]:
    """Group delta_k by k mod 3 and estimate the three limits.

    A class counts as Cauchy when |delta_{k+3} - delta_k| X_k in its later half
    never exceeds 100 times its maximum over the earlier half.  With ``strict``
    a non-Cauchy class raises ``AssertionError``.
    """
    if len(rep.rows) < 10:
        raise ValueError("need at least 10 rows")
    out = []
    for i in (1, 2, 3):
        ks = [r.k for r in rep.rows if r.k % 3 == i % 3 and r.k >= k_start]
        est = [rep.row(k).delta for k in ks]
        steps = [abs(float(b.mid - a.mid)) for a, b in zip(est, est[1:])]
        tail = est[-3:]
        spread = max(abs(float(a.mid - b.mid)) for a in tail for b in tail)
        decays = [_float(rep.row(k).decay.mid) for k in ks if rep.row(k).decay is not None]
        half = len(decays) // 2
        cauchy = not decays[half:] or max(decays[half:]) <= 100 * max(decays[:half] or decays)
        out.append(ThetaEstimate(i, est, est[-1], spread, steps, decays, cauchy))
        if strict and not cauchy:
            raise AssertionError(f"residue class {i}: delta_(k+3) - delta_k does not decay like 1/X_k")
    return out


def cube_floor_check(rep: SeqReport, k_start: int = 3, k_end: Optional[int] = None,
                     require_positive: bool = False) -> dict:
    rows = [r for r in rep.rows if r.k >= k_start and (k_end is None or r.k <= k_end)]
    if len(rows) < 5:
        raise ValueError("need at least 5 rows")
    kept = [r for r in rows if r.cube is not None]
    cmin = min(kept, key=lambda r: r.cube.mid)
    fmin = min(kept, key=lambda r: r.floor.mid)
    res = {
        "k_range": [rows[0].k, rows[-1].k],
        "excluded_zero_x0": [r.k for r in rows if r.cube is None],
        "min_cube": cmin.cube,
        "min_cube_k": cmin.k,
        "min_floor": fmin.floor,
        "min_floor_k": fmin.k,
        "positive": all(r.cube.certainly_positive() for r in kept),
    }
    if require_positive and not res["positive"]:
        raise AssertionError("{x_{k,0} xi^3} is not bounded away from 0")
    return res


# -- simultaneous approximation by brute force -------------------------------------


def _scan_chunk(args):
    n1, n2, shift, lo, hi = args
    one = 1 << shift
    best = None
    for x0 in range(lo, hi + 1):
        a = x0 * n1
        b = x0 * n2
        x1 = (a + (one >> 1)) >> shift
        x2 = (b + (one >> 1)) >> shift
        v = max(abs(a - (x1 << shift)), abs(b - (x2 << shift)))
        if best is None or v < best[0]:
            best = (v, x0, x1, x2)
    return best


@dataclass
class BruteForceResult:
    X: int
    point: Point3
    value: BallReal
    normalized: float


def simul_approx_bruteforce(xi: BallReal, X: int, jobs: int = 1) -> BruteForceResult:
    """min over 1 <= x0 <= X of max(|x0 xi - x1|, |x0 xi^2 - x2|), nearest x1, x2."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if xi.rad * 4 * X * X >= 1:
        raise PrecisionError("xi radius too large for this X")
    xi2 = xi.square()
    shift = max(xi.prec, xi2.prec, xi.mid.denominator.bit_length(), xi2.mid.denominator.bit_length())
    n1 = int(xi.mid * (1 << shift))
    n2 = int(xi2.mid * (1 << shift))
    bounds = _partition(1, X, max(1, jobs))
    tasks = [(n1, n2, shift, lo, hi) for lo, hi in bounds]
    if jobs > 1 and X > 20000:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_chunk, tasks))
    else:
        parts = [_scan_chunk(t) for t in tasks]
    v, x0, x1, x2 = min(parts, key=lambda p: (p[0], p[1]))
    p = Point3(x0, x1, x2)
    value = L_xi(p, xi)
    return BruteForceResult(X, p, value, float(value.mid) * X ** (1 / GAMMA))


def _partition(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    n = hi - lo + 1
    parts = min(parts, n)
    size, extra = divmod(n, parts)
    out, start = [], lo
    for i in range(parts):
        end = start + size - 1 + (1 if i < extra else 0)
        out.append((start, end))
        start = end + 1
    return out


# -- convenience: sequence + xi at adequate precision --------------------------------


def xi_for_seed(seed: SeedSpec, bits: int, K_hint: int = 20) -> BallReal:
    """Ball for the number attached to ``seed`` with radius about 2**-bits.

    Fibonacci and eta seeds have explicit continued fractions and get certified
    balls; other seeds fall back to the heuristic tail-of-sequence estimate.
    """
    target = Fraction(1, 1 << bits)
    n = int(bits * 1.5) + 16
    if seed.kind == "fibonacci":
        return eval_cf(CFExpansion.fibonacci(seed.a, seed.b, n), target, bits)
    if seed.kind == "transported" and seed.label.startswith("eta:"):
        m = seed.base.a
        return eval_cf(CFExpansion.eta(m, n), target, bits)
    K = max(K_hint, 8)
    while True:
        seq = generate(seed, K)
        xi = xi_from_points(seq, bits)
        if xi.rad <= 2 * target or K > 200:
            return xi
        K += 2


def analyze(seed: SeedSpec, K: int, bits: int = 256) -> tuple[PointSeq, SeqReport]:
    """Generate x_1..x_K and report on it, doubling precision until resolved."""
    seq = generate(seed, K)
    while True:
        try:
            xi = xi_for_seed(seed, bits, K + 4)
            return seq, report(seq, xi)
        except PrecisionError:
            if bits >= MAX_BITS:
                raise
            bits *= 2


def summary_json(rep: SeqReport, thetas=None, floor=None, brute=None) -> str:
    doc = {"format": "extremal.report/1", "xi": rep.xi.to_json(), **rep.summary}
    if thetas:
        doc["theta"] = [
            {"residue": t.residue, "limit": t.limit.to_str(20), "spread": t.spread,
             "cauchy": t.cauchy}
            for t in thetas
        ]
    if floor:
        doc["cube_floor"] = {
            "min_cube": floor["min_cube"].to_str(20), "min_cube_k": floor["min_cube_k"],
            "min_floor": floor["min_floor"].to_str(12), "min_floor_k": floor["min_floor_k"],
            "positive": floor["positive"], "excluded_zero_x0": floor["excluded_zero_x0"],
        }
    if brute:
        doc["bruteforce"] = [
            {"X": b.X, "point": [str(c) for c in b.point], "value": b.value.to_str(12),
             "c2_stat": b.normalized}
            for b in brute
        ]
    return json.dumps(doc, indent=1, sort_keys=True)
