"""Best approximations to xi by algebraic integers of degree at most 3.

The enumeration runs in float64 with numpy; every reported record, and the
candidate attaining the minimum of dist * H**(gamma**2), is then recomputed
exactly: its minimal polynomial's real roots are isolated with rational
bisection and each enclosure carries a sign-change certificate.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .realnum import BallReal, PrecisionError, format_decimal, log_abs

GAMMA = (1 + math.sqrt(5)) / 2
GAMMA2 = GAMMA + 1
ORACLE_MAX_H = 50


@dataclass(frozen=True, order=True)
class MonicPoly:
    """x + r, x^2 + p x + q, or x^3 + p x^2 + q x + r."""

    degree: int
    p: int = 0
    q: int = 0
    r: int = 0

    def coeffs(self) -> list[int]:
        """Coefficients from the leading 1 down to the constant term."""
        if self.degree == 1:
            return [1, self.r]
        if self.degree == 2:
            return [1, self.p, self.q]
        if self.degree == 3:
            return [1, self.p, self.q, self.r]
        raise ValueError(f"degree {self.degree} not in 1..3")

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coeffs())

    def __call__(self, x):
        v = 0
        for c in self.coeffs():
            v = v * x + c
        return v

    def derivative_coeffs(self) -> list[int]:
        cs = self.coeffs()
        n = len(cs) - 1
        return [c * (n - i) for i, c in enumerate(cs[:-1])]

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs()):
            e = self.degree - i
            if c == 0:
                continue
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else "+"
            else:
                coef = f"{c:+d}"
            terms.append(f"{coef}{mono}")
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    ds = set(small) | {n // d for d in small}
    return sorted(ds | {-d for d in ds})


def is_irreducible(poly: MonicPoly) -> bool:
    if poly.degree == 1:
        return True
    if poly.degree == 2:
        disc = poly.p * poly.p - 4 * poly.q
        return disc < 0 or math.isqrt(disc) ** 2 != disc
    if poly.r == 0:
        return False
    return not any(poly(d) == 0 for d in _divisors(poly.r))


# -- exact root isolation --------------------------------------------------------


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _sqrt_bracket(n: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rationals lo <= sqrt(n) <= hi with hi - lo <= 2**-bits."""
    scale = 1 << bits
    num, den = n.numerator, n.denominator
    s = math.isqrt(num * den * scale * scale)
    lo = Fraction(s, den * scale)
    return lo, Fraction(s + 1, den * scale)


def _bisect(poly: MonicPoly, lo: Fraction, hi: Fraction, target: Fraction):
    flo = _sign(poly(lo))
    if flo == 0:
        return lo, lo
    if _sign(poly(hi)) == 0:
        return hi, hi
    while hi - lo > 2 * target:
        mid = (lo + hi) / 2
        fm = _sign(poly(mid))
        if fm == 0:
            return mid, mid
        if fm == flo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def real_roots(poly: MonicPoly, target_rad=Fraction(1, 1 << 64)) -> list[BallReal]:
    """All real roots as disjoint balls of radius <= target_rad.

    Each returned ball either is an exact root (radius 0) or has endpoints at
    which the polynomial takes opposite signs.
    """
    target = Fraction(target_rad)
    if target <= 0:
        raise ValueError("target_rad must be positive")
    B = Fraction(1 + max(abs(c) for c in poly.coeffs()[1:]))
    if poly.degree == 1:
        return [BallReal.exact(-poly.r, _bits_for(target))]
    dcs = poly.derivative_coeffs()
    # breakpoints: critical points (enclosed in tiny intervals when irrational)
    cuts: list[tuple[Fraction, Fraction]] = []
    if poly.degree == 2:
        c = Fraction(-poly.p, 2)
        cuts.append((c, c))
    else:
        a, b, c0 = dcs  # 3x^2 + 2p x + q
        disc = Fraction(b * b - 4 * a * c0)
        if disc > 0:
            eps_bits = max(64, _bits_for(target) + 8)
            slo, shi = _sqrt_bracket(disc, eps_bits)
            cuts = [((-b - shi) / Fraction(2 * a), (-b - slo) / Fraction(2 * a)),
                    ((-b + slo) / Fraction(2 * a), (-b + shi) / Fraction(2 * a))]
    points = [-B]
    for lo, hi in cuts:
        points.extend([lo, hi] if lo != hi else [lo])
    points.append(B)
    roots: list[tuple[Fraction, Fraction]] = []
    for u, v in zip(points, points[1:]):
        if u == v:
            continue
        su, sv = _sign(poly(u)), _sign(poly(v))
        if su == 0:
            if not roots or roots[-1] != (u, u):
                roots.append((u, u))
            continue
        if sv == 0:
            roots.append((v, v))
            continue
        if su != sv:
            roots.append(_bisect(poly, u, v, target))
    prec = _bits_for(target)
    out = []
    for lo, hi in roots:
        ball = BallReal.make((lo + hi) / 2, (hi - lo) / 2, True, prec)
        out.append(ball)
    return out


def _bits_for(target: Fraction) -> int:
    return max(64, target.denominator.bit_length() - target.numerator.bit_length() + 8)


# -- records ----------------------------------------------------------------------


@dataclass
class ApproxRecord:
    poly: MonicPoly
    height: int
    root: BallReal
    dist: BallReal
    exponent: Optional[float]
    c1_stat: BallReal

    def key(self):
        return (self.poly.degree, self.poly.p, self.poly.q, self.poly.r)

    def csv_row(self) -> list:
        return [
            self.poly.degree, self.poly.p, self.poly.q, self.poly.r, self.height,
            format_decimal(self.root.mid, 25), _fmt_small(self.dist.mid),
            "" if self.exponent is None else f"{self.exponent:.6f}",
            _fmt_small(self.c1_stat.mid),
        ]


def _fmt_small(x: Fraction) -> str:
    return f"{float(x):.12e}"


def certify(poly: MonicPoly, xi: BallReal) -> ApproxRecord:
    """Exact nearest-root record for ``poly`` (assumed irreducible)."""
    target = max(xi.rad, Fraction(1, 1 << xi.prec)) / 4
    roots = real_roots(poly, target)
    if not roots:
        raise ValueError(f"{poly} has no real root")
    best = min(roots, key=lambda b: (abs(b.mid - xi.mid), b.mid))
    root = BallReal(best.mid, best.rad, xi.certified, max(best.prec, xi.prec))
    dist = abs(xi - root)
    H = poly.height
    power = Fraction(math.exp(GAMMA2 * math.log(H))) if H > 1 else Fraction(1)
    c1 = dist * BallReal.make(power, power / 10**9, True, xi.prec)
    expo = None
    if H >= 2 and dist.mid > 0:
        expo = -log_abs(dist.mid) / math.log(H)
    return ApproxRecord(poly, H, root, dist, expo, c1)


# -- vectorized float enumeration -------------------------------------------------


def _polyval(p, q, r, x):
    return ((x + p) * x + q) * x + r


def _cubic_nearest(p, q, r, x: float, iters: int = 64):
    """Nearest real root to x of x^3 + p x^2 + q x + r, elementwise (float64).

    Returns (dist, root, integer_root_found).
    """
    B = 1.0 + np.maximum(np.maximum(np.abs(p), np.abs(q)), np.abs(r))
    d = p * p - 3.0 * q
    s = np.sqrt(np.maximum(d, 0.0))
    c1 = (-p - s) / 3.0
    c2 = (-p + s) / 3.0
    los = [-B, c1, c2]
    his = [c1, c2, B]
    best_d = np.full(p.shape, np.inf)
    best_x = np.full(p.shape, np.nan)
    int_root = np.zeros(p.shape, dtype=bool)
    pi, qi, ri = p.astype(np.int64), q.astype(np.int64), r.astype(np.int64)
    for a, b in zip(los, his):
        a = a.copy()
        b = b.copy()
        fa = _polyval(p, q, r, a)
        fb = _polyval(p, q, r, b)
        valid = (b > a) & (np.sign(fa) * np.sign(fb) <= 0)
        for _ in range(iters):
            m = 0.5 * (a + b)
            fm = _polyval(p, q, r, m)
            left = np.sign(fa) * np.sign(fm) <= 0
            b = np.where(left, m, b)
            a = np.where(left, a, m)
            fa = np.where(left, fa, fm)
        root = 0.5 * (a + b)
        di = np.where(valid, np.abs(root - x), np.inf)
        better = (di < best_d) | ((di == best_d) & (root < best_x))
        best_x = np.where(better, root, best_x)
        best_d = np.where(better, di, best_d)
        n = np.rint(np.where(valid, root, 0.0)).astype(np.int64)
        int_root |= valid & (((n + pi) * n + qi) * n + ri == 0)
    return best_d, best_x, int_root


def _cubic_disc(p, q, r):
    return 18 * p * q * r - 4 * p**3 * r + p * p * q * q - 4 * q**3 - 27 * r * r


def _cubic_chunk(args):
    """Irreducible cubic candidates for p in [p_lo, p_hi]; float arrays."""
    xi_f, Hmax, window, p_lo, p_hi = args
    ps = np.arange(p_lo, p_hi + 1, dtype=np.int64)
    qs = np.arange(-Hmax, Hmax + 1, dtype=np.int64)
    P, Q = np.meshgrid(ps, qs, indexing="ij")
    P, Q = P.ravel(), Q.ravel()
    if window is None:
        rs = np.arange(-Hmax, Hmax + 1, dtype=np.int64)
        P = np.repeat(P, rs.size)
        Q = np.repeat(Q, rs.size)
        R = np.tile(rs, ps.size * qs.size)
    else:
        centre = -np.rint(xi_f**3 + P * xi_f**2 + Q * xi_f).astype(np.int64)
        offs = np.arange(-window, window + 1, dtype=np.int64)
        P = np.repeat(P, offs.size)
        Q = np.repeat(Q, offs.size)
        R = np.repeat(centre, offs.size) + np.tile(offs, centre.size)
        keep = np.abs(R) <= Hmax
        P, Q, R = P[keep], Q[keep], R[keep]
    keep = (R != 0) & (_cubic_disc(P, Q, R) != 0)
    P, Q, R = P[keep], Q[keep], R[keep]
    dist, _, int_root = _cubic_nearest(P.astype(float), Q.astype(float), R.astype(float), xi_f)
    keep = ~int_root
    P, Q, R, dist = P[keep], Q[keep], R[keep], dist[keep]
    H = np.maximum(np.maximum(np.abs(P), np.abs(Q)), np.maximum(np.abs(R), 1))
    return np.full(P.size, 3, dtype=np.int64), P, Q, R, H, dist


def _low_degree(xi_f: float, Hmax: int):
    rs = np.arange(-Hmax, Hmax + 1, dtype=np.int64)
    d1 = np.abs(xi_f + rs)
    H1 = np.maximum(np.abs(rs), 1)
    z1 = np.zeros_like(rs)

    ps = np.arange(-Hmax, Hmax + 1, dtype=np.int64)
    P, Q = np.meshgrid(ps, ps, indexing="ij")
    P, Q = P.ravel(), Q.ravel()
    D = P * P - 4 * Q
    s = np.floor(np.sqrt(np.maximum(D, 0).astype(float))).astype(np.int64)
    s = s - (s * s > D) + ((s + 1) * (s + 1) <= D)
    keep = (D > 0) & (s * s != D)
    P, Q, D = P[keep], Q[keep], D[keep]
    sq = np.sqrt(D.astype(float))
    t = -(P + np.where(P >= 0, sq, -sq)) / 2.0
    other = Q / t
    d2 = np.minimum(np.abs(t - xi_f), np.abs(other - xi_f))
    H2 = np.maximum(np.maximum(np.abs(P), np.abs(Q)), 1)
    return (
        np.concatenate([np.ones_like(rs), np.full(P.size, 2, dtype=np.int64)]),
        np.concatenate([z1, P]),
        np.concatenate([z1, Q]),
        np.concatenate([rs, np.zeros_like(P)]),
        np.concatenate([H1, H2]),
        np.concatenate([d1, d2]),
    )


@dataclass
class SearchResult:
    records: list[ApproxRecord]
    Hmax: int
    window: Optional[int]
    n_candidates: int
    min_c1: ApproxRecord
    min_c1_by_height: np.ndarray
    bits: int
    certified: bool
    wall_time: float = 0.0
    method: str = "windowed"

    @property
    def max_exponent(self) -> Optional[float]:
        ex = [r.exponent for r in self.records if r.height >= 10 and r.exponent is not None]
        return max(ex) if ex else None

    def record_keys(self) -> list[tuple]:
        return [r.key() for r in self.records]

    CSV_COLUMNS = ("degree", "p", "q", "r", "H", "root", "dist", "exponent", "c1_stat")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for rec in self.records:
            w.writerow(rec.csv_row())
        return buf.getvalue()

    def summary(self, include_time: bool = False) -> dict:
        d = {
            "format": "extremal.approx/1",
            "Hmax": self.Hmax,
            "window": self.window,
            "method": self.method,
            "record_count": len(self.records),
            "candidates": self.n_candidates,
            "min_c1_stat": _fmt_small(self.min_c1.c1_stat.mid),
            "min_c1_poly": str(self.min_c1.poly),
            "min_c1_height": self.min_c1.height,
            "max_exponent_H10": self.max_exponent,
            "last_exponent": self.records[-1].exponent if self.records else None,
            "gamma_squared": GAMMA2,
            "bits": self.bits,
            "certified": self.certified,
        }
        if include_time:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def to_json(self, include_time: bool = False) -> str:
        return json.dumps(self.summary(include_time), indent=1, sort_keys=True)


def _check_xi(xi: BallReal, Hmax: int) -> None:
    if Hmax < 1:
        raise ValueError("Hmax must be >= 1")
    if xi.rad * Fraction(Hmax) ** 4 > 1:
        raise PrecisionError(f"xi radius {float(xi.rad):.3g} exceeds Hmax^-4")


def _reduce(xi: BallReal, Hmax: int, parts, window, method, t0) -> SearchResult:
    deg, P, Q, R, H, dist = (np.concatenate(cols) for cols in zip(*parts))
    order = np.lexsort((R, Q, P, deg, H))
    deg, P, Q, R, H, dist = deg[order], P[order], Q[order], R[order], H[order], dist[order]
    prev = np.concatenate([[np.inf], np.minimum.accumulate(dist)[:-1]])
    is_rec = dist < prev
    close = ~is_rec & (np.abs(dist - prev) <= 1e-9 * prev)

    records = []
    for i in np.flatnonzero(is_rec):
        records.append(certify(MonicPoly(int(deg[i]), int(P[i]), int(Q[i]), int(R[i])), xi))
    for a, b in zip(records, records[1:]):
        if not b.dist.certainly_lt(a.dist):
            raise PrecisionError(f"cannot order records {a.poly} and {b.poly}")
    for i in np.flatnonzero(close):
        rec = certify(MonicPoly(int(deg[i]), int(P[i]), int(Q[i]), int(R[i])), xi)
        before = [r for r in records if (r.height, r.key()) < (rec.height, rec.key())]
        if before and before[-1].dist.upper > rec.dist.lower:  # ties are not records
            raise PrecisionError(f"ambiguous record decision at {rec.poly}")

    Hf = H.astype(float)
    c1 = dist * np.exp(GAMMA2 * np.log(Hf))
    by_h = np.full(Hmax + 1, np.inf)
    np.minimum.at(by_h, H, c1)
    j = int(np.argmin(c1))
    min_rec = certify(MonicPoly(int(deg[j]), int(P[j]), int(Q[j]), int(R[j])), xi)
    return SearchResult(
        records=records, Hmax=Hmax, window=window, n_candidates=int(dist.size),
        min_c1=min_rec, min_c1_by_height=by_h, bits=xi.prec, certified=xi.certified,
        wall_time=time.perf_counter() - t0, method=method,
    )


def _p_chunks(Hmax: int, n: int) -> list[tuple[int, int]]:
    vals = list(range(-Hmax, Hmax + 1))
    size = max(1, math.ceil(len(vals) / n))
    return [(vals[i], vals[min(i + size, len(vals)) - 1]) for i in range(0, len(vals), size)]


def best_records(xi: BallReal, Hmax: int, window: Optional[int] = 2, jobs: int = 1) -> SearchResult:
    """Strictly improving approximations |xi - alpha| over all alpha of height <= Hmax.

    Cubic constant terms are restricted to ``window`` around -(xi^3 + p xi^2 + q xi);
    ``window=None`` scans every constant term.
    """
    t0 = time.perf_counter()
    _check_xi(xi, Hmax)
    if window is not None and window < 1:
        raise ValueError("window must be >= 1")
    xi_f = float(xi.mid)
    per_chunk = 24 if window is not None else max(1, 400_000 // (2 * Hmax + 1) ** 2)
    chunks = _p_chunks(Hmax, max(1, math.ceil((2 * Hmax + 1) / per_chunk)))
    tasks = [(xi_f, Hmax, window, lo, hi) for lo, hi in chunks]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_cubic_chunk, tasks))
    else:
        parts = [_cubic_chunk(t) for t in tasks]
    parts.append(_low_degree(xi_f, Hmax))
    return _reduce(xi, Hmax, parts, window, "windowed" if window is not None else "full", t0)


# -- independent oracle -----------------------------------------------------------


def _oracle_dist(poly: MonicPoly, xi_f: float) -> float:
    roots = np.roots(poly.coeffs())
    best = math.inf
    for z in roots:
        if abs(z.imag) > 1e-7 * max(1.0, abs(z)):
            continue
        x = float(z.real)
        for _ in range(3):  # polish
            d = sum(c * (len(poly.coeffs()) - 1 - i) * x ** (len(poly.coeffs()) - 2 - i)
                    for i, c in enumerate(poly.coeffs()[:-1]))
            if d == 0:
                break
            x -= poly(x) / d
        best = min(best, abs(x - xi_f))
    return best


def full_scan_oracle(xi: BallReal, Hmax: int) -> SearchResult:
    """Plain-Python scan over every monic polynomial of height <= Hmax (test oracle).

    Irreducibility by divisor test, roots by companion-matrix eigenvalues.
    """
    if Hmax < 1:
        raise ValueError("Hmax must be >= 1")
    if Hmax > ORACLE_MAX_H:
        raise ValueError(f"oracle limited to Hmax <= {ORACLE_MAX_H}")
    t0 = time.perf_counter()
    _check_xi(xi, Hmax)
    xi_f = float(xi.mid)
    rows = []
    rng = range(-Hmax, Hmax + 1)
    for r in rng:
        rows.append((1, 0, 0, r))
    for p in rng:
        for q in rng:
            rows.append((2, p, q, 0))
            for r in rng:
                rows.append((3, p, q, r))
    cols = [[] for _ in range(6)]
    for deg, p, q, r in rows:
        poly = MonicPoly(deg, p, q, r)
        if not is_irreducible(poly):
            continue
        dist = _oracle_dist(poly, xi_f)
        if not math.isfinite(dist):
            continue
        for c, v in zip(cols, (deg, p, q, r, max(1, poly.height), dist)):
            c.append(v)
    part = tuple(np.asarray(c, dtype=np.int64 if i < 5 else float) for i, c in enumerate(cols))
    return _reduce(xi, Hmax, [part], None, "oracle", t0)


def exponent_trend(records: list[ApproxRecord], result: Optional[SearchResult] = None) -> dict:
    big = [r for r in records if r.height >= 10]
    if len(big) < 3:
        raise ValueError("need at least 3 records with H >= 10")
    exps = [r.exponent for r in records if r.exponent is not None]
    min_rec = min(records, key=lambda r: r.c1_stat.mid)
    out = {
        "gamma_squared": GAMMA2,
        "exponents": exps,
        "heights": [r.height for r in records],
        "min_c1_records": float(min_rec.c1_stat.mid),
        "monotone": all(b.dist.mid < a.dist.mid for a, b in zip(records, records[1:])),
    }
    if result is not None:
        finite = result.min_c1_by_height[np.isfinite(result.min_c1_by_height)]
        out["min_c1_all"] = float(result.min_c1.c1_stat.mid)
        out["bounded_away_from_zero"] = bool(finite.min() > 0)
    return out
