"""Exact two-phase simplex over the rationals.

The tableau is stored fraction-free: every entry is an integer and the
true value is ``entry / det`` where ``det`` is the previous pivot
(Bareiss-style integer-preserving pivoting).  Bland's rule picks both
the entering and the leaving variable, so the method terminates without
perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import QVector, dot, integer_row, is_zero


@dataclass(frozen=True)
class LpProblem:
    """``min objective . x`` subject to ``a . x >= beta`` (``ineq``) and
    ``a . x == beta`` (``eq``); all variables are free."""

    objective: QVector
    ineq: tuple = ()
    eq: tuple = ()
    nvars: int = field(default=-1)

    def __post_init__(self):
        if self.nvars < 0:
            object.__setattr__(self, "nvars", len(self.objective))
        if len(self.objective) != self.nvars:
            raise ValueError("objective length differs from nvars")
        for a, _ in (*self.ineq, *self.eq):
            if len(a) != self.nvars:
                raise ValueError("constraint length differs from nvars")


@dataclass(frozen=True)
class Optimal:
    point: QVector
    value: Fraction


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Unbounded:
    ray: QVector


LpOutcome = Optimal | Infeasible | Unbounded


class _Tableau:
    """Integer tableau; row ``i`` holds basic variable ``basis[i]``."""

    def __init__(self, rows: list[list[int]], basis: list[int], ncols: int):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols  # structural columns; the last entry of a row is the rhs
        self.det = 1
        self.cost: list[int] = [0] * (ncols + 1)

    def pivot(self, r: int, c: int) -> None:
        rows, det = self.rows, self.det
        prow = rows[r]
        p = prow[c]
        if p < 0:
            prow = rows[r] = [-x for x in prow]
            p = -p
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f == 0:
                rows[i] = [x * p // det for x in row] if p != det else row
            else:
                rows[i] = [(x * p - f * y) // det for x, y in zip(row, prow)]
        f = self.cost[c]
        if f == 0:
            self.cost = [x * p // det for x in self.cost]
        else:
            self.cost = [(x * p - f * y) // det for x, y in zip(self.cost, prow)]
        self.det = p
        self.basis[r] = c

    def set_cost(self, c: Sequence[int]) -> None:
        """Install reduced costs for the integer objective ``c``."""
        det = self.det
        cost = [det * cj for cj in c] + [0]
        for row, b in zip(self.rows, self.basis):
            cb = c[b]
            if cb:
                cost = [x - cb * y for x, y in zip(cost, row)]
        self.cost = cost

    def entering(self, allowed: int) -> int | None:
        for j in range(allowed):
            if self.cost[j] < 0:
                return j
        return None

    def leaving(self, c: int) -> int | None:
        best = None
        for i, row in enumerate(self.rows):
            a = row[c]
            if a <= 0:
                continue
            if best is None:
                best = i
                continue
            lhs = row[-1] * self.rows[best][c]
            rhs = self.rows[best][-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best = i
        return best

    def run(self, allowed: int) -> int | None:
        """Pivot to optimality; returns an unbounded entering column or None."""
        while True:
            c = self.entering(allowed)
            if c is None:
                return None
            r = self.leaving(c)
            if r is None:
                return c
            self.pivot(r, c)


def _standard_form(p: LpProblem):
    """Rows over columns ``x+ (n) | x- (n) | slacks``, rhs nonnegative."""
    n = p.nvars
    k = len(p.ineq)
    ncols = 2 * n + k
    rows = []
    for idx, (a, beta) in enumerate((*p.ineq, *p.eq)):
        full = list(a) + [-x for x in a] + [0] * k
        if idx < k:
            full[2 * n + idx] = -1
        full.append(beta)
        ints = integer_row(full) if not is_zero(full) else [0] * (ncols + 1)
        if ints[-1] < 0:
            ints = [-x for x in ints]
        rows.append(ints)
    return rows, ncols


def solve_lp(p: LpProblem) -> LpOutcome:
    """Minimize exactly; the returned point or ray satisfies every
    constraint with exact (in)equality."""
    n = p.nvars
    rows, ncols = _standard_form(p)
    m = len(rows)
    # artificial variable i sits in column ncols + i
    tab_rows = []
    for i, r in enumerate(rows):
        art = [0] * m
        art[i] = 1
        tab_rows.append(r[:-1] + art + [r[-1]])
    tab = _Tableau(tab_rows, [ncols + i for i in range(m)], ncols + m)
    tab.set_cost([0] * ncols + [1] * m)
    tab.run(ncols + m)
    if tab.cost[-1] != 0:
        return Infeasible()

    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= ncols:
            row = tab.rows[i]
            c = next((j for j in range(ncols) if row[j] != 0), None)
            if c is None:
                del tab.rows[i]
                del tab.basis[i]
                continue
            tab.pivot(i, c)
        i += 1
    tab.rows = [row[:ncols] + [row[-1]] for row in tab.rows]
    tab.ncols = ncols

    obj = list(p.objective) + [-x for x in p.objective] + [0] * (ncols - 2 * n)
    cint = integer_row(obj) if not is_zero(obj) else [0] * ncols
    tab.set_cost(cint)
    c = tab.run(ncols)

    if c is not None:
        z = [0] * ncols
        z[c] = tab.det
        for row, b in zip(tab.rows, tab.basis):
            z[b] = -row[c]
        ray = tuple(Fraction(z[j] - z[n + j]) for j in range(n))
        g = max(abs(x) for x in ray)
        return Unbounded(tuple(x / g for x in ray))

    z = [Fraction(0)] * ncols
    for row, b in zip(tab.rows, tab.basis):
        z[b] = Fraction(row[-1], tab.det)
    point = tuple(z[j] - z[n + j] for j in range(n))
    return Optimal(point, dot(p.objective, point))


def feasible(p: LpProblem) -> bool:
    zero = LpProblem(tuple(Fraction(0) for _ in range(p.nvars)), p.ineq, p.eq, p.nvars)
    return isinstance(solve_lp(zero), Optimal)
