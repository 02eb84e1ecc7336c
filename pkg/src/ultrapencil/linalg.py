"""Dense vectors and square matrices over exact rationals with the sup norm.

The operator norm of a matrix under the sup norm is the maximum entry norm;
inversion is Gauss-Jordan with pivoting on the entry of maximal ultrametric
norm (lowest row index on ties), which keeps runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .padic import PAdicContext, UltraNorm, format_rational, padic_abs, parse_rational

Vector = Tuple[Fraction, ...]


def vec(entries: Iterable) -> Vector:
    return tuple(Fraction(e) for e in entries)


def basis_vector(n: int, j: int) -> Vector:
    return tuple(Fraction(1) if i == j else Fraction(0) for i in range(n))


def vec_add(x: Vector, y: Vector) -> Vector:
    if len(x) != len(y):
        raise ValueError("vector length mismatch")
    return tuple(a + b for a, b in zip(x, y))


def vec_scale(c: Fraction, x: Vector) -> Vector:
    return tuple(c * a for a in x)


def vec_norm(x: Vector, ctx: PAdicContext) -> UltraNorm:
    """Sup norm: max entry norm; Zero iff every entry vanishes."""
    best = UltraNorm.zero()
    for e in x:
        a = padic_abs(e, ctx)
        if a > best:
            best = a
    return best


def apply_functional(f: Vector, y: Vector) -> Fraction:
    """Row functional y -> sum f_i * y_i."""
    if len(f) != len(y):
        raise ValueError("functional/vector length mismatch")
    return sum((a * b for a, b in zip(f, y)), Fraction(0))


@dataclass(frozen=True)
class Matrix:
    """Immutable square matrix of exact rationals."""

    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square and nonempty")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "Matrix":
        return Matrix(tuple(tuple(Fraction(e) for e in r) for r in rows))

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(n: int) -> "Matrix":
        return Matrix.from_rows([[0] * n for _ in range(n)])

    @staticmethod
    def diagonal(entries: Sequence) -> "Matrix":
        n = len(entries)
        return Matrix.from_rows(
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @property
    def n(self) -> int:
        return len(self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return Matrix(
            tuple(
                tuple(a + b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Fraction(-1))

    def scale(self, c: Fraction) -> "Matrix":
        c = Fraction(c)
        return Matrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def mul(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        cols = list(zip(*other.rows))
        return Matrix(
            tuple(
                tuple(
                    sum((self.rows[i][k] * cols[j][k] for k in range(n)), Fraction(0))
                    for j in range(n)
                )
                for i in range(n)
            )
        )

    def matvec(self, x: Vector) -> Vector:
        if self.n != len(x):
            raise ValueError("dimension mismatch")
        return tuple(
            sum((a * b for a, b in zip(r, x)), Fraction(0)) for r in self.rows
        )

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_diagonal(self) -> bool:
        return all(
            self.rows[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j
        )

    def det(self) -> Fraction:
        """Exact determinant by pivoted rational elimination."""
        n = self.n
        m = [list(r) for r in self.rows]
        sign = 1
        result = Fraction(1)
        for c in range(n):
            piv = None
            for r in range(c, n):
                if m[r][c] != 0:
                    piv = r
                    break
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                sign = -sign
            result *= m[c][c]
            inv = 1 / m[c][c]
            for r in range(c + 1, n):
                if m[r][c] == 0:
                    continue
                f = m[r][c] * inv
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
        return sign * result

    def inverse(self, ctx: PAdicContext) -> Optional["Matrix"]:
        """Exact inverse, or None when singular.

        Pivot choice: maximal ultrametric norm in the current column, lowest
        row index on ties.
        """
        n = self.n
        m = [
            list(r) + list(row)
            for r, row in zip(self.rows, Matrix.identity(n).rows)
        ]
        for c in range(n):
            piv = None
            piv_norm = UltraNorm.zero()
            for r in range(c, n):
                a = padic_abs(m[r][c], ctx)
                if a > piv_norm:
                    piv_norm = a
                    piv = r
            if piv is None:
                return None
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [a * inv for a in m[c]]
            for r in range(n):
                if r == c or m[r][c] == 0:
                    continue
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return Matrix(tuple(tuple(row[n:]) for row in m))

    def to_json(self, ctx: Optional[PAdicContext] = None) -> dict:
        obj = {"rows": [[format_rational(a) for a in r] for r in self.rows]}
        if ctx is not None:
            obj["p"] = ctx.p
        return obj

    @staticmethod
    def from_json(obj: dict) -> "Matrix":
        return Matrix.from_rows(
            [[parse_rational(a) for a in r] for r in obj["rows"]]
        )


def op_norm(M: Matrix, ctx: PAdicContext) -> UltraNorm:
    """Operator norm for the sup norm: the maximum entry norm.

    An exact identity in the non-archimedean setting, not an estimate; it is
    attained at some coordinate vector.
    """
    best = UltraNorm.zero()
    for r in M.rows:
        for a in r:
            x = padic_abs(a, ctx)
            if x > best:
                best = x
    return best


def outer(u: Vector, f: Vector) -> Matrix:
    """Rank-one matrix of the map y -> f(y) * u."""
    if len(u) != len(f):
        raise ValueError("dimension mismatch")
    return Matrix(tuple(tuple(ui * fj for fj in f) for ui in u))
