"""Exact rational vectors, matrices and linear-system solving.

Scalars are :class:`fractions.Fraction`, which is always kept in lowest
terms with a positive denominator.  Vectors are tuples of fractions and
matrices are tuples of row tuples, so every value here is immutable and
hashable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction
QVector = tuple  # tuple[Fraction, ...]
QMatrix = tuple  # tuple[QVector, ...]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class RationalParseError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` (optionally signed) or an integer.

    Floats are rejected: they would smuggle rounding into the core.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise RationalParseError(f"not a rational: {value!r}")
    match = _RATIONAL_RE.match(value)
    if match is None:
        raise RationalParseError(f"not a rational: {value!r}")
    num, den = match.groups()
    den = int(den) if den is not None else 1
    if den == 0:
        raise RationalParseError(f"zero denominator in {value!r}")
    return Fraction(int(num), den)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def vec(values: Iterable) -> QVector:
    return tuple(parse_rational(v) for v in values)


def mat(rows: Iterable[Iterable]) -> QMatrix:
    out = tuple(vec(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def zeros(n: int) -> QVector:
    return (Fraction(0),) * n


def unit(n: int, i: int, scale=1) -> QVector:
    return tuple(Fraction(scale) if j == i else Fraction(0) for j in range(n))


def identity(n: int) -> QMatrix:
    return tuple(unit(n, i) for i in range(n))


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence, b: Sequence) -> QVector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> QVector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> QVector:
    return tuple(c * x for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> QMatrix:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matvec(m: Sequence[Sequence], x: Sequence) -> QVector:
    return tuple(dot(row, x) for row in m)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> QMatrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def primitive(v: Sequence) -> QVector:
    """Scale a nonzero rational vector to the coprime integer vector
    pointing the same way (zero vectors pass through unchanged)."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def integer_row(v: Sequence) -> list[int]:
    """Positive rescaling of ``v`` to a coprime integer list."""
    return [int(x) for x in primitive(v)]


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with first-nonzero pivoting.

    Returns the nonzero rows and the pivot column of each.
    """
    rows = [[Fraction(x) for x in r] for r in m]
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[QVector]:
    """Basis of ``{x : m x = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    if not m:
        return [unit(ncols, j) for j in range(ncols)]
    rows, pivots = rref(m)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``point + span(basis)`` of a consistent linear system."""

    point: QVector
    basis: tuple

    @property
    def unique(self) -> bool:
        return not self.basis


def gauss_solve(m: Sequence[Sequence], rhs: Sequence,
                ncols: int | None = None) -> AffineSolution | None:
    """Solve ``m x = rhs`` exactly; ``None`` means the system is inconsistent."""
    if len(m) != len(rhs):
        raise ValueError("row count of matrix and right-hand side differ")
    if ncols is None:
        if not m:
            raise ValueError("ncols required for an empty system")
        ncols = len(m[0])
    if not m:
        return AffineSolution(zeros(ncols), tuple(unit(ncols, j) for j in range(ncols)))
    aug = [list(r) + [Fraction(b)] for r, b in zip(m, rhs)]
    rows, pivots = rref(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(rows, pivots):
        x[p] = row[ncols]
    basis = nullspace(m, ncols)
    return AffineSolution(tuple(x), tuple(basis))


def affine_rank(points: Sequence[Sequence], directions: Sequence[Sequence] = ()) -> int:
    """Dimension of ``aff(points) + span(directions)``; -1 for no points."""
    if not points:
        return -1
    base = points[0]
    spans = [sub(p, base) for p in points[1:]] + [tuple(d) for d in directions]
    return rank(spans) if spans else 0
