"""Exact rational scalars, vectors and matrices.

Rationals are ``fractions.Fraction`` (always reduced, positive denominator).
Vectors are plain tuples of Fractions. Matrices wrap a tuple of row tuples.
Singular systems are reported as ``None`` rather than raised, because the
arrangement enumeration hits them constantly.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence, Tuple, Union

from .errors import DimensionMismatchError

Rational = Fraction
RatVector = Tuple[Fraction, ...]
RationalLike = Union[int, Fraction, str]


def rational(numerator: RationalLike, denominator: RationalLike = 1) -> Fraction:
    """Canonical rational; raises ZeroDivisionError on a zero denominator."""
    return Fraction(numerator) / Fraction(denominator)


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse "num/den" (or a bare integer)."""
    if isinstance(text, int):
        return Fraction(text)
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return rational(int(num), int(den))
    return Fraction(int(text))


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vector(values: Iterable[RationalLike]) -> RatVector:
    """Tuple of exact rationals."""
    return tuple(Fraction(v) for v in values)


def dot(a: Sequence, x: Sequence) -> Fraction:
    if len(a) != len(x):
        raise DimensionMismatchError(f"dot product of length {len(a)} and {len(x)}")
    total = Fraction(0)
    for ai, xi in zip(a, x):
        if ai:
            total += ai * xi
    return total


def sub(u: Sequence, v: Sequence) -> RatVector:
    """Componentwise u - v."""
    if len(u) != len(v):
        raise DimensionMismatchError(f"difference of length {len(u)} and {len(v)}")
    return tuple(Fraction(a) - b for a, b in zip(u, v))


def scale(c: RationalLike, v: Sequence) -> RatVector:
    """The vector c*v."""
    c = Fraction(c)
    return tuple(c * x for x in v)


@dataclass(frozen=True)
class RatMatrix:
    rows: Tuple[RatVector, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("matrix needs at least one row")
        width = len(self.rows[0])
        if width == 0 or any(len(r) != width for r in self.rows):
            raise DimensionMismatchError("matrix rows must share a positive length")

    @classmethod
    def of(cls, rows: Iterable[Iterable[RationalLike]]) -> "RatMatrix":
        return cls(tuple(vector(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.of([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, j: int) -> RatVector:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(self.column(j) for j in range(self.ncols)))

    def apply(self, x: Sequence) -> RatVector:
        return tuple(dot(r, x) for r in self.rows)


def row_reduce(rows: list, ncols: int) -> list:
    """Gauss-Jordan elimination in place on augmented rows; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_unique(rows: Sequence[Sequence], rhs: Sequence) -> Optional[RatVector]:
    """Unique solution of a (possibly non-square) system, or None.

    None covers both an inconsistent system and one with free variables.
    """
    if len(rows) != len(rhs):
        raise DimensionMismatchError(f"{len(rows)} equations but {len(rhs)} right-hand sides")
    if not rows:
        return None
    ncols = len(rows[0])
    augmented = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = row_reduce(augmented, ncols)
    for row in augmented[len(pivots):]:
        if row[-1] != 0:
            return None
    if len(pivots) < ncols:
        return None
    return tuple(augmented[i][-1] for i in range(ncols))


def solve_linear_system(A: RatMatrix, b: Sequence) -> Optional[RatVector]:
    """Exact solution of A·x = b for square A; None when A is singular."""
    if not A.is_square:
        raise DimensionMismatchError(f"expected a square matrix, got {A.nrows}x{A.ncols}")
    if len(b) != A.nrows:
        raise DimensionMismatchError(f"matrix has {A.nrows} rows, right-hand side {len(b)}")
    return solve_unique(A.rows, b)


def _bareiss(m: list) -> int:
    """Fraction-free determinant of an integer matrix (modified in place)."""
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def determinant(A: RatMatrix) -> Fraction:
    """Exact determinant; rows are scaled to integers, then Bareiss elimination."""
    if not A.is_square:
        raise DimensionMismatchError(f"expected a square matrix, got {A.nrows}x{A.ncols}")
    scaled = []
    denominator = 1
    for row in A.rows:
        row_lcm = lcm(*(v.denominator for v in row))
        scaled.append([int(v * row_lcm) for v in row])
        denominator *= row_lcm
    return Fraction(_bareiss(scaled), denominator)


def inverse(A: RatMatrix) -> Optional[RatMatrix]:
    """Inverse by solving for each unit column; None when singular."""
    n = A.nrows
    columns = []
    for j in range(n):
        unit = [1 if i == j else 0 for i in range(n)]
        col = solve_linear_system(A, unit)
        if col is None:
            return None
        columns.append(col)
    return RatMatrix(tuple(columns)).transpose()
