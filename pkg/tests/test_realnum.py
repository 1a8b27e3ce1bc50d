from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from extremal.exact import Mat2, Point3
from extremal.realnum import (
    BallReal, CFExpansion, PrecisionError, L_xi, cf_convergents, cf_from_ball, eval_cf,
    format_decimal, format_sci_up, frac_dist, gamma_ball, transport_real, xi_from_points,
)
from extremal.sequences import SeedSpec, generate, symmetric_prefixes

from conftest import cached_seq

# 45 digits of [0; 1, 2, 1, 1, 2, ...], cross-checked against an mpmath
# backward recursion over 400 quotients at 80 digits
XI_12_DIGITS = "0.720484667632132530883536908286005089878224383"
# 1 / (2 + [0; 3, 1, 3, 3, 1, ...]), the number attached to the ea:1 seed
XI_EA1_DIGITS = "0.441389807269227580049626614301733964401940334"

fracs = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
rads = st.fractions(min_value=0, max_value=Fraction(1, 100), max_denominator=10**6)


def ball_and_point(f, r, t):
    """A ball around f of radius r together with a point inside it."""
    return BallReal.make(f, r, True, 128), f + r * t


points_in_balls = st.tuples(fracs, rads, st.fractions(min_value=-1, max_value=1, max_denominator=1000))


@given(points_in_balls, points_in_balls)
def test_arithmetic_encloses_exact(u, v):
    a, x = ball_and_point(*u)
    b, y = ball_and_point(*v)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert abs(a).contains(abs(x))
    assert a.square().contains(x * x)
    assert a.cube().contains(x ** 3)
    if abs(b.mid) > b.rad:
        assert (a / b).contains(x / y)


def test_reciprocal_of_zero_ball():
    with pytest.raises(ZeroDivisionError):
        BallReal.make(Fraction(1, 10), Fraction(1, 5)).reciprocal()


def test_exact_square():
    b = BallReal.exact(2).square()
    assert b.mid == 4 and b.rad == 0


def test_gamma_identities():
    g = gamma_ball(256)
    for z in (g * g - g - 1, 1 / g - (g - 1), (g ** -3) - (2 * g - 3)):
        assert z.contains_zero()
        assert z.rad < Fraction(1, 2**200)
    z = g * g - g - 1
    assert z.rad <= 3 * g.rad * (2 * g.mid + 2)
    assert format_decimal(g.mid, 20) == "1.61803398874989484820"


def test_gamma_refinement_is_nested():
    coarse, fine = gamma_ball(64), gamma_ball(256)
    assert coarse.contains(fine) and fine.rad < coarse.rad


def test_cf_convergents():
    assert cf_convergents([0, 1, 2]) == [Fraction(0), Fraction(1), Fraction(2, 3)]
    assert cf_convergents([0, 2, 1, 3])[-1] == Fraction(4, 11)
    dens = [c.denominator for c in cf_convergents(CFExpansion.fibonacci(1, 2, 5))]
    assert dens == [1, 1, 3, 4, 7, 18]
    with pytest.raises(ValueError):
        cf_convergents([0, 1], 3)


def test_cf_convergents_match_prefix_products():
    # the symmetric prefix product after n letters is (q_n, p_n, p_{n-1})
    conv = cf_convergents(CFExpansion.fibonacci(1, 2, 12))
    for n, pt in symmetric_prefixes(1, 2, 12):
        c = conv[n]
        assert (pt.x0, pt.x1) == (c.denominator, c.numerator)


def test_cf_rejects_bad_quotients():
    with pytest.raises(ValueError):
        CFExpansion((0, 1, 0, 2))


def test_eval_cf_golden():
    b = eval_cf([0] + [1] * 200, Fraction(1, 10**30))
    g = gamma_ball(200)
    assert b.overlaps(g - 1)
    assert b.rad <= Fraction(1, 10**30)


def test_eval_cf_xi12_fixture():
    b = eval_cf(CFExpansion.fibonacci(1, 2, 400), Fraction(1, 10**50))
    assert format_decimal(b.mid, 45) == XI_12_DIGITS
    deeper = eval_cf(CFExpansion.fibonacci(1, 2, 600), Fraction(1, 10**80))
    assert b.overlaps(deeper) and b.contains(deeper)


def test_eval_cf_depths_overlap():
    cf = CFExpansion.fibonacci(2, 5, 300)
    for n in (40, 60, 80):
        a = eval_cf(cf.quotients[:n], Fraction(1, 10**10))
        b = eval_cf(cf.quotients[: n + 5], Fraction(1, 10**10))
        assert a.overlaps(b)


def test_eval_cf_insufficient_quotients():
    with pytest.raises(PrecisionError):
        eval_cf([0, 1, 2, 1], Fraction(1, 10**20))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_eta_two_ways(m):
    t = Fraction(1, 2**256)
    eta = eval_cf(CFExpansion.eta(m, 500), t)
    xi = eval_cf(CFExpansion.fibonacci(m, m + 2, 500), t)
    assert eta.overlaps((BallReal.exact(m + 1) + xi).reciprocal())
    assert eta.overlaps(transport_real(xi, Mat2(0, -1, -1, m + 1)))


def test_cf_from_ball():
    eta = eval_cf(CFExpansion.eta(1, 400), Fraction(1, 2**256))
    assert cf_from_ball(eta, 20) == list(CFExpansion.eta(1, 19).quotients[:20])


def test_frac_dist_examples():
    assert frac_dist(BallReal.exact(Fraction(14, 10))).contains(Fraction(2, 5))
    half = frac_dist(BallReal.exact(Fraction(5, 2)))
    assert half.mid == Fraction(1, 2) and half.rad == 0
    assert frac_dist(BallReal.exact(Fraction(-3, 10))).contains(Fraction(3, 10))
    with pytest.raises(PrecisionError):
        frac_dist(BallReal.make(0, Fraction(1, 3)))


def _dist(x):
    return abs(x - round(x))


@given(fracs, st.fractions(min_value=0, max_value=Fraction(1, 5), max_denominator=1000),
       st.fractions(min_value=-1, max_value=1, max_denominator=100))
def test_frac_dist_encloses(f, r, t):
    b = BallReal.make(f, r, True, 64)
    d = frac_dist(b)
    assert d.contains(_dist(f + r * t))
    assert 0 <= d.mid <= Fraction(1, 2)
    assert d.lower >= -d.rad and d.upper <= Fraction(1, 2) + d.rad


def test_frac_dist_two_precisions():
    x2 = cached_seq("ea:1", 4).x(2)
    lo = frac_dist(xi_from_points(cached_seq("ea:1", 12), 256).cube() * x2.x0)
    hi = frac_dist(xi_from_points(cached_seq("ea:1", 16), 1024).cube() * x2.x0)
    assert lo.overlaps(hi) and lo.mid > 0


def test_L_xi_basic():
    xi = eval_cf(CFExpansion.fibonacci(1, 2, 300), Fraction(1, 2**200))
    x = Point3(1, round(float(xi.mid)), round(float(xi.mid) ** 2))
    assert L_xi(x, xi).upper <= Fraction(1, 2)
    y = Point3(25, 18, 13)
    assert L_xi(y, xi).overlaps(L_xi(-y, xi))


def test_xi_from_points_agrees_with_cf():
    fib = xi_from_points(cached_seq("fib:1,2", 12), 512)
    cf = eval_cf(CFExpansion.fibonacci(1, 2, 1000), Fraction(1, 2**512))
    assert not fib.certified
    assert fib.overlaps(cf)


def test_xi_from_points_ea1_consistent():
    a = xi_from_points(cached_seq("ea:1", 12), 512)
    b = xi_from_points(cached_seq("ea:1", 14), 1024)
    assert a.overlaps(b) and b.rad < a.rad
    assert format_decimal(b.mid, 45) == XI_EA1_DIGITS
    # independent certified value: ea:1 has expansion [0; 2, 3, 1, 3, 3, 1, ...]
    cf = eval_cf((0, 2, *CFExpansion.fibonacci(3, 1, 1500).quotients[1:]), Fraction(1, 2**1024))
    assert cf.overlaps(b)


def test_xi_from_points_rejects_degenerate():
    with pytest.raises(ValueError):
        xi_from_points([Point3(2, 1, 1)] * 8)
    with pytest.raises(ValueError):
        xi_from_points(cached_seq("ea:1", 5))


def test_formatting():
    assert format_sci_up(Fraction(1, 3)) == "3.34e-1"
    assert format_sci_up(Fraction(1, 2**20000)).endswith("e-6021")
    assert format_decimal(Fraction(-1, 8), 3) == "-0.125"
    s = BallReal.make(Fraction(1, 3), Fraction(1, 10**6), True, 64).to_str(5)
    assert s.startswith("0.33333 ± 1.01e-6")
