"""Exact 2x2 integer matrices and points of Z^3 viewed as symmetric matrices.

Everything here is plain Python ``int`` arithmetic, so entries may grow to
thousands of digits without any loss.
"""

from __future__ import annotations

from dataclasses import dataclass


class SymmetryError(ValueError):
    """Raised when a matrix expected to be symmetric is not."""


@dataclass(frozen=True)
class Mat2:
    e00: int
    e01: int
    e10: int
    e11: int

    @classmethod
    def rows(cls, r0, r1) -> "Mat2":
        return cls(int(r0[0]), int(r0[1]), int(r1[0]), int(r1[1]))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat_mul(self, other)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.e00, -self.e01, -self.e10, -self.e11)

    def scale(self, s: int) -> "Mat2":
        return Mat2(s * self.e00, s * self.e01, s * self.e10, s * self.e11)

    @property
    def T(self) -> "Mat2":
        return transpose(self)

    def trace(self) -> int:
        return self.e00 + self.e11

    def det(self) -> int:
        return det2(self)

    def inverse(self) -> "Mat2":
        """Integral inverse; only defined for unimodular matrices."""
        d = det2(self)
        if d not in (1, -1):
            raise ValueError(f"matrix {self} is not unimodular (det={d})")
        return Mat2(self.e11 * d, -self.e01 * d, -self.e10 * d, self.e00 * d)

    def to_point(self) -> "Point3":
        if not is_symmetric(self):
            raise SymmetryError(f"matrix {self} is not symmetric")
        return Point3(self.e00, self.e01, self.e11)

    def as_rows(self) -> list[list[int]]:
        return [[self.e00, self.e01], [self.e10, self.e11]]


@dataclass(frozen=True)
class Point3:
    """Integer point (x0, x1, x2), identified with ((x0, x1), (x1, x2))."""

    x0: int
    x1: int
    x2: int

    def __iter__(self):
        return iter((self.x0, self.x1, self.x2))

    def __getitem__(self, i: int) -> int:
        return (self.x0, self.x1, self.x2)[i]

    def __neg__(self) -> "Point3":
        return Point3(-self.x0, -self.x1, -self.x2)

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x0 - other.x0, self.x1 - other.x1, self.x2 - other.x2)

    def scale(self, s: int) -> "Point3":
        return Point3(s * self.x0, s * self.x1, s * self.x2)

    def norm(self) -> int:
        return max(abs(self.x0), abs(self.x1), abs(self.x2))

    def det(self) -> int:
        return self.x0 * self.x2 - self.x1 * self.x1

    def to_mat(self) -> Mat2:
        return Mat2(self.x0, self.x1, self.x1, self.x2)

    def normalized(self) -> "Point3":
        """Sign-normalize so the first nonzero coordinate is positive."""
        for c in self:
            if c:
                return self if c > 0 else -self
        return self


def _as_mat(a) -> Mat2:
    return a.to_mat() if isinstance(a, Point3) else a


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    a, b = _as_mat(a), _as_mat(b)
    return Mat2(
        a.e00 * b.e00 + a.e01 * b.e10,
        a.e00 * b.e01 + a.e01 * b.e11,
        a.e10 * b.e00 + a.e11 * b.e10,
        a.e10 * b.e01 + a.e11 * b.e11,
    )


def det2(a) -> int:
    if isinstance(a, Point3):
        return a.det()
    return a.e00 * a.e11 - a.e01 * a.e10


def det3(x: Point3, y: Point3, z: Point3) -> int:
    """Determinant of the 3x3 matrix whose rows are the coordinates of x, y, z."""
    return (
        x.x0 * (y.x1 * z.x2 - y.x2 * z.x1)
        - x.x1 * (y.x0 * z.x2 - y.x2 * z.x0)
        + x.x2 * (y.x0 * z.x1 - y.x1 * z.x0)
    )


def transpose(a) -> Mat2:
    a = _as_mat(a)
    return Mat2(a.e00, a.e10, a.e01, a.e11)


def is_symmetric(a) -> bool:
    a = _as_mat(a)
    return a.e01 == a.e10


def is_unimodular(a) -> bool:
    return det2(a) in (1, -1)


J = Mat2(0, 1, -1, 0)
