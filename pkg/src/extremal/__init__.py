"""Extremal real numbers, their point sequences, and approximation by cubic integers."""

from .exact import J, Mat2, Point3, det2, det3, is_symmetric, is_unimodular, mat_mul, transpose
from .realnum import BallReal, CFExpansion, cf_convergents, eval_cf, frac_dist, gamma_ball, L_xi, xi_from_points
from .sequences import (
    IdentityError,
    PointSeq,
    SeedSpec,
    fib_matrix,
    fib_seed,
    fibonacci_word,
    generate,
    lemma26_offdiag_check,
    lemma26_trace_check,
    seed_Ea,
    transport,
)

__version__ = "0.1.0"
