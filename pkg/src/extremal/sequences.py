"""Canonical point sequences x_1, x_2, ... satisfying x_{k+2} = x_{k+1} S x_k.

Three seed families are supported:

* ``fibonacci(a, b)`` -- the Fibonacci continued fraction [0; a, b, a, a, b, ...]
  with matrix M = ((ab+1, a), (b, 1)).  Its first two points are recovered by
  scanning prefix products of continued-fraction matrices for symmetry.
* ``Ea(a)`` -- the explicit seed with M = ((a, 1), (-1, 0)).
* ``transported(base, C)`` -- the image of a base sequence under the
  congruence x -> C^{-1} x tC^{-1}, which carries M to tC M C.

All checks are exact integer identities; a failure raises ``IdentityError``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .exact import Mat2, Point3, SymmetryError, det2, is_symmetric, is_unimodular


class IdentityError(AssertionError):
    """An exact identity that must hold for a valid sequence failed."""

    def __init__(self, what: str, k: int, detail: str = ""):
        self.what = what
        self.k = k
        super().__init__(f"{what} fails at k={k}" + (f": {detail}" if detail else ""))


class SeedError(ValueError):
    pass


def fibonacci_word(n: int, a="a", b="b") -> list:
    """First ``n`` letters of the fixed point of a -> ab, b -> a."""
    if n < 1:
        raise ValueError("n must be >= 1")
    word = [0]
    while len(word) < n:
        nxt = []
        for s in word:
            nxt.extend((0, 1) if s == 0 else (0,))
        word = nxt
    return [a if s == 0 else b for s in word[:n]]


def fib_matrix(a: int, b: int) -> Mat2:
    if a == b:
        raise SeedError("fibonacci seeds need distinct a, b (xi_{a,a} is quadratic)")
    if a < 1 or b < 1:
        raise SeedError("fibonacci seeds need positive a, b")
    return Mat2(a * b + 1, a, b, 1)


def symmetric_prefixes(a: int, b: int, scan_limit: int) -> list[tuple[int, Point3]]:
    """All symmetric prefix products of ((q, 1), (1, 0)) along the Fibonacci word.

    Returns ``(prefix_length, point)`` pairs.
    """
    out = []
    prod = Mat2.identity()
    for n, q in enumerate(fibonacci_word(scan_limit, a, b), start=1):
        prod = prod @ Mat2(q, 1, 1, 0)
        if is_symmetric(prod):
            out.append((n, prod.to_point()))
    return out


def fib_seed(a: int, b: int, scan_limit: int = 64) -> tuple[Point3, Point3]:
    fib_matrix(a, b)  # validates a, b
    if scan_limit < 3:
        raise ValueError("scan_limit must be >= 3")
    found = symmetric_prefixes(a, b, scan_limit)
    if len(found) < 2:
        raise SeedError(f"fewer than two symmetric prefixes within {scan_limit} letters")
    return found[0][1], found[1][1]


def seed_Ea(a: int) -> tuple[Point3, Point3, Mat2]:
    if a < 1:
        raise SeedError("Ea seeds need a >= 1")
    x1 = Point3(1, 1, 0)
    x2 = Point3(a**3 + 2 * a, a**3 - a**2 + 2 * a - 1, a**3 - 2 * a**2 + 3 * a - 2)
    return x1, x2, Mat2(a, 1, -1, 0)


def eta_matrix(m: int) -> Mat2:
    """The congruence C that sends xi_{m,m+2} to 1/(m + 1 + xi_{m,m+2})."""
    return Mat2(0, -1, -1, m + 1)


def congruence(x: Point3, C: Mat2) -> Point3:
    """C^{-1} x tC^{-1}, exact."""
    Ci = C.inverse()
    return (Ci @ x.to_mat() @ Ci.T).to_point()


@dataclass(frozen=True)
class SeedSpec:
    kind: str
    a: Optional[int] = None
    b: Optional[int] = None
    base: Optional["SeedSpec"] = None
    C: Optional[Mat2] = None
    label: str = ""
    x1: Point3 = field(init=False, compare=False)
    x2: Point3 = field(init=False, compare=False)
    M: Mat2 = field(init=False, compare=False)

    def __post_init__(self):
        if self.kind == "fibonacci":
            M = fib_matrix(self.a, self.b)
            x1, x2 = fib_seed(self.a, self.b)
        elif self.kind == "Ea":
            x1, x2, M = seed_Ea(self.a)
        elif self.kind == "transported":
            if self.base is None or self.C is None:
                raise SeedError("transported seed needs base and C")
            if not is_unimodular(self.C):
                raise SeedError(f"transport matrix {self.C} is not unimodular")
            C = self.C
            M = C.T @ self.base.M @ C
            x1 = congruence(self.base.x1, C).normalized()
            x2 = congruence(self.base.x2, C).normalized()
        else:
            raise SeedError(f"unknown seed kind {self.kind!r}")
        if is_symmetric(M) or not is_unimodular(M):
            raise SeedError(f"matrix {M} must be non-symmetric and unimodular")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "M", M)

    @classmethod
    def fibonacci(cls, a: int, b: int) -> "SeedSpec":
        return cls("fibonacci", a=a, b=b, label=f"fib:{a},{b}")

    @classmethod
    def Ea(cls, a: int) -> "SeedSpec":
        return cls("Ea", a=a, label=f"ea:{a}")

    @classmethod
    def transported(cls, base: "SeedSpec", C: Mat2, label: str = "") -> "SeedSpec":
        return cls("transported", base=base, C=C, label=label or f"{base.label}@{C.as_rows()}")

    @classmethod
    def eta(cls, m: int) -> "SeedSpec":
        return cls.transported(cls.fibonacci(m, m + 2), eta_matrix(m), label=f"eta:{m}")

    @classmethod
    def parse(cls, text: str) -> "SeedSpec":
        """Parse ``ea:<a>``, ``fib:<a>,<b>`` or ``eta:<m>``."""
        kind, _, args = text.partition(":")
        try:
            nums = [int(s) for s in args.split(",")] if args else []
        except ValueError:
            raise SeedError(f"bad seed parameters in {text!r}") from None
        if kind == "ea" and len(nums) == 1:
            return cls.Ea(nums[0])
        if kind == "fib" and len(nums) == 2:
            return cls.fibonacci(*nums)
        if kind == "eta" and len(nums) == 1:
            if nums[0] < 1:
                raise SeedError("eta needs m >= 1")
            return cls.eta(nums[0])
        raise SeedError(f"unknown seed {text!r}")

    def describe(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.kind in ("fibonacci", "Ea"):
            d["a"] = self.a
            if self.kind == "fibonacci":
                d["b"] = self.b
        else:
            d["base"] = self.base.describe()
            d["C"] = self.C.as_rows()
        d["M"] = self.M.as_rows()
        return d


@dataclass
class PointSeq:
    seed: SeedSpec
    points: tuple[Point3, ...]
    sign_log: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def x(self, k: int) -> Point3:
        """The point x_k (1-based, as in the recurrence)."""
        if k < 1:
            raise IndexError(k)
        return self.points[k - 1]

    @property
    def M(self) -> Mat2:
        return self.seed.M

    def S(self, k: int) -> Mat2:
        """Matrix used in x_{k+2} = x_{k+1} S x_k."""
        return self.M if k % 2 == 1 else self.M.T

    def to_json(self) -> str:
        doc = {
            "format": "extremal.sequence/1",
            "seed": self.seed.describe(),
            "K": len(self.points),
            "points": [[str(c) for c in p] for p in self.points],
            "sign_log": {
                name: {str(k): v for k, v in sorted(log.items())}
                for name, log in sorted(self.sign_log.items())
            },
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PointSeq":
        doc = json.loads(text)
        seed = _seed_from_descriptor(doc["seed"])
        pts = tuple(Point3(*(int(c) for c in p)) for p in doc["points"])
        log = {
            name: {int(k): (tuple(v) if isinstance(v, list) else v) for k, v in entries.items()}
            for name, entries in doc.get("sign_log", {}).items()
        }
        return cls(seed, pts, log)


def _seed_from_descriptor(d: dict) -> SeedSpec:
    if d["kind"] == "fibonacci":
        return SeedSpec.fibonacci(d["a"], d["b"])
    if d["kind"] == "Ea":
        return SeedSpec.Ea(d["a"])
    return SeedSpec.transported(
        _seed_from_descriptor(d["base"]), Mat2.rows(*d["C"]), label=d.get("label", "")
    )


def generate(seed: SeedSpec, K: int) -> PointSeq:
    """Points x_1..x_K, each checked symmetric and unimodular as it is produced."""
    if K < 2:
        raise ValueError("K must be >= 2")
    pts = [seed.x1, seed.x2][:K]
    for k, p in enumerate(pts, start=1):
        if not is_unimodular(p):
            raise IdentityError("unimodularity", k, f"det={det2(p)}")
    M, Mt = seed.M, seed.M.T
    for k in range(1, K - 1):
        S = M if k % 2 == 1 else Mt
        prod = pts[k] .to_mat() @ S @ pts[k - 1].to_mat()
        try:
            p = prod.to_point()
        except SymmetryError:
            raise IdentityError("symmetry", k + 2, str(prod)) from None
        if not is_unimodular(p):
            raise IdentityError("unimodularity", k + 2, f"det={det2(p)}")
        pts.append(p)
    return PointSeq(seed, tuple(pts))


def check_recurrence(seq: PointSeq) -> None:
    for k in range(1, len(seq) - 1):
        rhs = (seq.x(k + 1).to_mat() @ seq.S(k) @ seq.x(k).to_mat())
        if rhs != seq.x(k + 2).to_mat():
            raise IdentityError("recurrence", k + 2)
    for k, p in enumerate(seq.points, start=1):
        if not is_unimodular(p):
            raise IdentityError("unimodularity", k)


def lemma26_trace_check(seq: PointSeq) -> list[dict]:
    """x_{k+2} = t_k x_{k+1} + eps_k x_{k-1} with t_k linear in x_k.

    With M = ((a, b), (c, d)), t_k = a x_{k,0} + (b + c) x_{k,1} + d x_{k,2};
    also checks t_k = trace(x_k S) and eps_k = -det(x_k S), where S is the
    matrix with x_{k+1} = x_k S x_{k-1}.
    """
    if len(seq) < 4:
        raise ValueError("need at least 4 points")
    M = seq.M
    a, b, c, d = M.e00, M.e01, M.e10, M.e11
    rows = []
    log = seq.sign_log.setdefault("trace", {})
    for k in range(2, len(seq) - 1):
        xk = seq.x(k)
        t = a * xk.x0 + (b + c) * xk.x1 + d * xk.x2
        diff = seq.x(k + 2) - seq.x(k + 1).scale(t)
        prev = seq.x(k - 1)
        if diff == prev:
            eps = 1
        elif diff == -prev:
            eps = -1
        else:
            raise IdentityError("trace recurrence", k, f"residual {diff} vs {prev}")
        xS = xk.to_mat() @ seq.S(k - 1)
        if xS.trace() != t:
            raise IdentityError("trace relation", k, f"{xS.trace()} != {t}")
        if -xS.det() != eps:
            raise IdentityError("sign relation", k, f"-det={-xS.det()} eps={eps}")
        log[k] = eps
        rows.append({"k": k, "t": t, "eps": eps})
    return rows


_SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def lemma26_offdiag_check(seq: PointSeq) -> list[dict]:
    """x_{k,0} x_{k+1,2} - x_{k,2} x_{k+1,0} = s1 (a x_{k-1,0} - d x_{k-1,2}) + s2 (b - c) x_{k-1,1}."""
    if len(seq) < 3:
        raise ValueError("need at least 3 points")
    M = seq.M
    a, b, c, d = M.e00, M.e01, M.e10, M.e11
    rows = []
    log = seq.sign_log.setdefault("offdiag", {})
    for k in range(2, len(seq)):
        xk, xn, xp = seq.x(k), seq.x(k + 1), seq.x(k - 1)
        lhs = xk.x0 * xn.x2 - xk.x2 * xn.x0
        u = a * xp.x0 - d * xp.x2
        v = (b - c) * xp.x1
        for s1, s2 in _SIGN_PAIRS:
            if lhs == s1 * u + s2 * v:
                break
        else:
            raise IdentityError("off-diagonal identity", k, f"lhs={lhs}, terms {u}, {v}")
        log[k] = (s1, s2)
        rows.append({"k": k, "lhs": lhs, "s1": s1, "s2": s2})
    return rows


def third_coord_check(seq: PointSeq) -> list[dict]:
    """x_{k+2,2} = a x_{k,0} x_{k+1,2} +- x_{k-1,2}; only meaningful for Ea matrices."""
    M = seq.M
    if (M.e01, M.e10, M.e11) != (1, -1, 0):
        raise ValueError("third-coordinate recurrence needs M = ((a, 1), (-1, 0))")
    a = M.e00
    rows = []
    for k in range(2, len(seq) - 1):
        r = seq.x(k + 2).x2 - a * seq.x(k).x0 * seq.x(k + 1).x2
        p = seq.x(k - 1).x2
        if r == p:
            s = 1
        elif r == -p:
            s = -1
        else:
            raise IdentityError("third-coordinate recurrence", k, f"{r} vs {p}")
        rows.append({"k": k, "sign": s})
    return rows


def transport(seq: PointSeq, C: Mat2) -> PointSeq:
    """Carry ``seq`` to the sequence of the number whose (eta, -1) is proportional to (xi, -1) C.

    The seed points are sign-normalized and the remaining points regenerated from
    the recurrence with tC M C; each is then checked to equal +-C^{-1} x_k tC^{-1}.
    """
    if not is_unimodular(C):
        raise SeedError(f"transport matrix {C} is not unimodular")
    new_seed = SeedSpec.transported(seq.seed, C)
    out = generate(new_seed, len(seq))
    for k in range(1, len(seq) + 1):
        y = congruence(seq.x(k), C)
        if out.x(k) not in (y, -y):
            raise IdentityError("transport", k, f"{out.x(k)} vs {y}")
    return out


def verify_all(seq: PointSeq) -> dict:
    """Run every exact identity; returns a summary or raises ``IdentityError``."""
    check_recurrence(seq)
    trace = lemma26_trace_check(seq)
    off = lemma26_offdiag_check(seq)
    summary = {"K": len(seq), "recurrence": True, "trace_rows": len(trace), "offdiag_rows": len(off)}
    M = seq.M
    if (M.e01, M.e10, M.e11) == (1, -1, 0):
        summary["third_coord_rows"] = len(third_coord_check(seq))
    return summary
