"""Midpoint-radius ("ball") real arithmetic on dyadic rationals, and continued fractions.

A :class:`BallReal` stands for every real number in ``[mid - rad, mid + rad]``.
Midpoints are kept on the grid ``2**-prec``; whatever is lost by snapping to the
grid is added to the radius, and radii are only ever rounded up, so enclosures
stay valid through any chain of operations.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_BITS = int(os.environ.get("EXTREMAL_BITS", "256"))
MAX_BITS = 16384
_RAD_BITS = 40  # significant bits kept in a radius


class PrecisionError(ArithmeticError):
    """The enclosure is too wide for the requested operation."""


def _is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def _snap(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Nearest point of the 2**-prec grid to ``x`` and the exact distance to it."""
    if _is_dyadic(x) and x.denominator.bit_length() - 1 <= prec:
        return x, Fraction(0)
    n, d = x.numerator, x.denominator
    m = ((n << (prec + 1)) + d) // (2 * d)
    y = Fraction(m, 1 << prec)
    return y, abs(x - y)


def _up(r: Fraction) -> Fraction:
    """Dyadic upper bound of a nonnegative rational with at most _RAD_BITS bits."""
    if r == 0:
        return Fraction(0)
    if _is_dyadic(r) and r.numerator.bit_length() <= _RAD_BITS:
        return r
    shift = _RAD_BITS - (r.numerator.bit_length() - r.denominator.bit_length())
    if shift >= 0:
        m = -((-r.numerator << shift) // r.denominator)
        return Fraction(m, 1 << shift)
    m = -((-r.numerator) // (r.denominator << -shift))
    return Fraction(m << -shift)


def log_abs(x) -> float:
    """Natural log of |x| for ints or Fractions of any size."""
    x = Fraction(x)
    if x == 0:
        return -math.inf
    return math.log(abs(x.numerator)) - math.log(x.denominator)


@dataclass(frozen=True)
class BallReal:
    mid: Fraction
    rad: Fraction = Fraction(0)
    certified: bool = True
    prec: int = DEFAULT_BITS

    @classmethod
    def make(cls, value, rad=0, certified=True, prec=DEFAULT_BITS) -> "BallReal":
        mid, err = _snap(Fraction(value), prec)
        return cls(mid, _up(Fraction(rad) + err), certified, prec)

    @classmethod
    def exact(cls, value, prec=DEFAULT_BITS) -> "BallReal":
        return cls.make(value, 0, True, prec)

    # -- coercion and bookkeeping --------------------------------------------

    def _coerce(self, other) -> "BallReal":
        if isinstance(other, BallReal):
            return other
        return BallReal.exact(other, self.prec)

    def _finish(self, mid: Fraction, rad: Fraction, other: "BallReal" = None) -> "BallReal":
        prec = self.prec if other is None else max(self.prec, other.prec)
        cert = self.certified and (other is None or other.certified)
        mid, err = _snap(mid, prec)
        return BallReal(mid, _up(rad + err), cert, prec)

    def with_prec(self, prec: int) -> "BallReal":
        return BallReal.make(self.mid, self.rad, self.certified, prec)

    @property
    def lower(self) -> Fraction:
        return self.mid - self.rad

    @property
    def upper(self) -> Fraction:
        return self.mid + self.rad

    def contains(self, x) -> bool:
        if isinstance(x, BallReal):
            return self.lower <= x.lower and x.upper <= self.upper
        return self.lower <= Fraction(x) <= self.upper

    def contains_zero(self) -> bool:
        return self.contains(0)

    def overlaps(self, other: "BallReal") -> bool:
        return abs(self.mid - other.mid) <= self.rad + other.rad

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other)
        return self.upper < other.lower

    def certainly_positive(self) -> bool:
        return self.lower > 0

    def __float__(self) -> float:
        return float(self.mid)

    # -- arithmetic ------------------------------------------------------------

    def __neg__(self) -> "BallReal":
        return BallReal(-self.mid, self.rad, self.certified, self.prec)

    def __add__(self, other) -> "BallReal":
        o = self._coerce(other)
        return self._finish(self.mid + o.mid, self.rad + o.rad, o)

    __radd__ = __add__

    def __sub__(self, other) -> "BallReal":
        o = self._coerce(other)
        return self._finish(self.mid - o.mid, self.rad + o.rad, o)

    def __rsub__(self, other) -> "BallReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BallReal":
        o = self._coerce(other)
        rad = abs(self.mid) * o.rad + abs(o.mid) * self.rad + self.rad * o.rad
        return self._finish(self.mid * o.mid, rad, o)

    __rmul__ = __mul__

    def reciprocal(self) -> "BallReal":
        m = abs(self.mid)
        if m <= self.rad:
            raise ZeroDivisionError(f"ball {self} contains zero")
        rad = self.rad / (m * (m - self.rad))
        return self._finish(1 / self.mid, rad)

    def __truediv__(self, other) -> "BallReal":
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "BallReal":
        return self._coerce(other) * self.reciprocal()

    def square(self) -> "BallReal":
        return self * self

    def cube(self) -> "BallReal":
        return self * self * self

    def __pow__(self, n: int) -> "BallReal":
        if n < 0:
            return (self ** (-n)).reciprocal()
        out = BallReal.exact(1, self.prec)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self) -> "BallReal":
        if self.lower >= 0:
            return self
        if self.upper <= 0:
            return -self
        hi = max(-self.lower, self.upper)
        return BallReal(hi / 2, _up(hi / 2), self.certified, self.prec)

    # -- formatting ------------------------------------------------------------

    def to_str(self, digits: int = 30) -> str:
        return f"{format_decimal(self.mid, digits)} ± {format_sci_up(self.rad)}"

    def __str__(self) -> str:
        return self.to_str()

    def to_json(self, digits: int = 40) -> dict:
        return {"value": self.to_str(digits), "bits": self.prec, "certified": self.certified}


def ball_max(a: BallReal, b: BallReal) -> BallReal:
    lo = max(a.lower, b.lower)
    hi = max(a.upper, b.upper)
    cert = a.certified and b.certified
    prec = max(a.prec, b.prec)
    return BallReal((lo + hi) / 2, _up((hi - lo) / 2), cert, prec)


def ball_min(a: BallReal, b: BallReal) -> BallReal:
    return -ball_max(-a, -b)


def format_decimal(x: Fraction, digits: int) -> str:
    x = Fraction(x)
    scaled = round(abs(x) * 10**digits)
    sign = "-" if x < 0 and scaled else ""
    s = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


def format_sci_up(r: Fraction, sig: int = 3) -> str:
    """Scientific notation of r, rounded up to ``sig`` significant digits."""
    r = Fraction(r)
    if r == 0:
        return "0"
    e = math.floor(log_abs(r) / math.log(10))
    # log_abs is a float; correct an off-by-one either way
    while r >= Fraction(10) ** (e + 1):
        e += 1
    while r < Fraction(10) ** e:
        e -= 1
    m = r / Fraction(10) ** (e - sig + 1)
    mi = -((-m.numerator) // m.denominator)
    if mi >= 10**sig:
        mi, e = -((-mi) // 10), e + 1
    s = str(mi)
    return f"{s[0]}.{s[1:]}e{e:+d}"


def frac_dist(t: BallReal) -> BallReal:
    """Enclosure of the distance from t to the nearest integer."""
    if t.rad >= Fraction(1, 4):
        raise PrecisionError(f"radius {float(t.rad):.3g} too large to localize nearest integer")
    lo, hi = t.lower, t.upper

    def f(x: Fraction) -> Fraction:
        return abs(x - math.floor(x + Fraction(1, 2)))

    vals = [f(lo), f(hi)]
    mn, mx = min(vals), max(vals)
    if math.floor(hi) >= lo:  # an integer lies in [lo, hi]
        mn = Fraction(0)
    h = math.floor(hi - Fraction(1, 2)) + Fraction(1, 2)
    if h >= lo:
        mx = Fraction(1, 2)
    return BallReal((mn + mx) / 2, _up((mx - mn) / 2), t.certified, t.prec)


def gamma_ball(prec: int = DEFAULT_BITS) -> BallReal:
    """The golden ratio (1 + sqrt 5) / 2."""
    s = math.isqrt(5 << (2 * prec))  # s <= 2**prec sqrt(5) < s + 1
    return BallReal(Fraction((1 << prec) + s, 1 << (prec + 1)) + Fraction(1, 1 << (prec + 2)),
                    Fraction(1, 1 << (prec + 2)), True, prec + 2)


def L_xi(x, xi: BallReal) -> BallReal:
    """max(|x0 xi - x1|, |x0 xi^2 - x2|)."""
    x0, x1, x2 = x
    return ball_max(abs(xi * x0 - x1), abs(xi.square() * x0 - x2))


# -- continued fractions ---------------------------------------------------------


@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple[int, ...]

    def __post_init__(self):
        if any(q < 1 for q in self.quotients[1:]):
            raise ValueError("partial quotients after the first must be >= 1")

    def __len__(self) -> int:
        return len(self.quotients)

    @classmethod
    def fibonacci(cls, a: int, b: int, n: int) -> "CFExpansion":
        """[0; a, b, a, a, b, ...] with ``n`` quotients after the leading 0."""
        from .sequences import fibonacci_word

        return cls((0, *fibonacci_word(n, a, b)))

    @classmethod
    def eta(cls, m: int, n: int) -> "CFExpansion":
        """[0; m+1, m, m+2, m, m, m+2, ...] = 1 / (m + 1 + xi_{m,m+2})."""
        from .sequences import fibonacci_word

        return cls((0, m + 1, *fibonacci_word(n, m, m + 2)))


def _convergent_pairs(quotients: Iterable[int]):
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in quotients:
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        yield p0, q0


def cf_convergents(cf, n: int = None) -> list[Fraction]:
    qs = cf.quotients if isinstance(cf, CFExpansion) else tuple(cf)
    if n is None:
        n = len(qs)
    if n > len(qs):
        raise ValueError("n exceeds the number of quotients")
    return [Fraction(p, q) for p, q in _convergent_pairs(qs[:n])]


def eval_cf(cf, target_rad, prec: int = None) -> BallReal:
    """Certified ball for the value of an (infinite) continued fraction.

    Uses |xi - p_n/q_n| <= 1/(q_n q_{n+1}); the quotients given must be a
    correct prefix of the full expansion.
    """
    qs = cf.quotients if isinstance(cf, CFExpansion) else tuple(cf)
    target_rad = Fraction(target_rad)
    if prec is None:
        prec = max(DEFAULT_BITS, 2 - math.floor(math.log2(target_rad)) + 2)
    pairs = list(_convergent_pairs(qs))
    for (p, q), (_, qn) in zip(pairs, pairs[1:]):
        bound = Fraction(1, q * qn)
        if bound <= target_rad / 2:
            ball = BallReal.make(Fraction(p, q), bound, True, prec)
            if ball.rad <= target_rad:
                return ball
    raise PrecisionError(f"{len(qs)} quotients are not enough for radius {float(target_rad):.3g}")


def cf_from_ball(x: BallReal, n: int) -> list[int]:
    """Partial quotients shared by every number in the ball (at most ``n``)."""
    lo, hi = x.lower, x.upper
    out = []
    while len(out) < n:
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            break
        out.append(a)
        lo, hi = lo - a, hi - a
        if lo == 0 or hi == 0:
            break
        lo, hi = 1 / hi, 1 / lo
    return out


def xi_from_points(points: Sequence, prec: int = DEFAULT_BITS) -> BallReal:
    """Heuristic ball for lim x_{k,1}/x_{k,0} from the tail of a point sequence.

    Not certified: the radius is 2 * (|r_K - r_{K-1}| + |r_{K-1} - r_{K-2}|).
    The last three ratios must fall inside the result and the successive
    differences of the last four must strictly contract.
    """
    pts = list(getattr(points, "points", points))
    if len(pts) < 6:
        raise ValueError("need at least 6 points")
    tail = pts[-4:]
    if any(p[0] == 0 for p in tail):
        raise ValueError("zero leading coordinate in the tail")
    r = [Fraction(p[1], p[0]) for p in tail]
    rad = 2 * (abs(r[3] - r[2]) + abs(r[2] - r[1]))
    if rad == 0:
        raise ValueError("degenerate sequence: ratios do not move")
    ball = BallReal.make(r[3], rad, False, prec)
    steps = [abs(r[i + 1] - r[i]) for i in range(3)]
    if not (steps[0] > steps[1] > steps[2]):
        raise PrecisionError("tail ratios are not contracting")
    if not all(ball.contains(v) for v in r[1:]):
        raise PrecisionError("tail ratios escape the heuristic ball")
    return ball


def transport_real(xi: BallReal, C) -> BallReal:
    """The eta with (eta, -1) proportional to (xi, -1) C."""
    u = xi * C.e00 - C.e10
    v = xi * C.e01 - C.e11
    return -(u / v)
