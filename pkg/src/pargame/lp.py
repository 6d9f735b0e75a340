"""Exact rational two-phase simplex with Bland's rule.

Solves ``max c.x  s.t.  A x = b, x >= 0`` over :class:`fractions.Fraction`.
Dependent equality rows are removed by exact elimination before phase one,
so artificial variables can always be driven out of the basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import GameLabError

ZERO = Fraction(0)


class Infeasible(GameLabError):
    pass


class Unbounded(GameLabError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple
    objective: tuple
    a_eq: tuple  # rows, each a tuple of Fractions aligned with ``variables``
    b_eq: tuple

    def __post_init__(self):
        n = len(self.variables)
        if len(self.objective) != n:
            raise ValueError("objective length differs from variable count")
        if len(self.a_eq) != len(self.b_eq):
            raise ValueError("constraint rows and right-hand sides differ in count")
        for row in self.a_eq:
            if len(row) != n:
                raise ValueError("constraint row length differs from variable count")

    @property
    def shape(self) -> tuple:
        return len(self.a_eq), len(self.variables)


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    x: tuple
    basis: tuple
    dual: tuple  # multipliers for the independent rows listed in ``rows``
    rows: tuple
    pivots: int


def _independent_rows(a: list, b: list) -> list:
    """Indices of a maximal independent subset of rows; raises if the system is inconsistent."""
    m = len(a)
    n = len(a[0]) if m else 0
    work = [list(a[i]) + [b[i]] for i in range(m)]
    keep = []
    reduced = []  # (pivot column, row)
    for i in range(m):
        row = work[i]
        for col, prow in reduced:
            f = row[col]
            if f:
                for k in range(n + 1):
                    if prow[k]:
                        row[k] -= f * prow[k]
        piv = next((k for k in range(n) if row[k] != 0), None)
        if piv is None:
            if row[n] != 0:
                raise Infeasible("inconsistent equality constraints")
            continue
        inv = 1 / row[piv]
        row = [v * inv for v in row]
        for idx, (col, prow) in enumerate(reduced):
            f = prow[piv]
            if f:
                reduced[idx] = (col, [prow[k] - f * row[k] for k in range(n + 1)])
        reduced.append((piv, row))
        keep.append(i)
    return keep


class SimplexTableau:
    """Dense tableau; basis columns form an identity, basic values stay nonnegative."""

    def __init__(self, rows: list, rhs: list, basis: list):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.phase = 1
        self.pivots = 0

    def reduced_costs(self, cost: Sequence, allowed: Sequence[bool]) -> list:
        n = len(cost)
        red = [-cost[j] for j in range(n)]
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb:
                row = self.rows[i]
                for j in range(n):
                    if row[j]:
                        red[j] += cb * row[j]
        return [r if allowed[j] else ZERO for j, r in enumerate(red)]

    def pivot(self, r: int, c: int):
        prow = self.rows[r]
        inv = 1 / prow[c]
        nz = [j for j, v in enumerate(prow) if v]
        for j in nz:
            prow[j] *= inv
        self.rhs[r] *= inv
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1

    def optimize(self, cost: Sequence, allowed: Sequence[bool]):
        """Maximize ``cost.x`` using Bland's rule."""
        while True:
            red = self.reduced_costs(cost, allowed)
            enter = next((j for j, v in enumerate(red) if v < 0), None)
            if enter is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective is unbounded")
            self.pivot(best[1], enter)


def _solve_square(mat: list, rhs: list) -> list:
    """Solve ``mat y = rhs`` exactly (``mat`` square, nonsingular)."""
    n = len(mat)
    aug = [list(mat[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [aug[i][k] - f * aug[c][k] for k in range(n + 1)]
    return [aug[i][n] for i in range(n)]


def solve(lp: LinearProgram) -> LPSolution:
    """Exact optimum of ``lp`` together with a primal vertex and dual multipliers."""
    n = len(lp.variables)
    a = [[Fraction(v) for v in row] for row in lp.a_eq]
    b = [Fraction(v) for v in lp.b_eq]
    keep = _independent_rows(a, b) if a else []
    a = [a[i] for i in keep]
    b = [b[i] for i in keep]
    for i in range(len(a)):
        if b[i] < 0:
            a[i] = [-v for v in a[i]]
            b[i] = -b[i]
    m = len(a)
    rows = [a[i] + [Fraction(int(k == i)) for k in range(m)] for i in range(m)]
    tab = SimplexTableau(rows, list(b), [n + i for i in range(m)])
    total = n + m
    phase1 = [ZERO] * n + [Fraction(-1)] * m
    tab.optimize(phase1, [True] * total)
    if any(tab.rhs[i] != 0 for i in range(m) if tab.basis[i] >= n):
        raise Infeasible("phase one ended with positive artificial mass")
    for i in range(m):
        if tab.basis[i] >= n:
            col = next(j for j in range(n) if tab.rows[i][j] != 0)
            tab.pivot(i, col)
    tab.phase = 2
    cost = [Fraction(c) for c in lp.objective] + [ZERO] * m
    tab.optimize(cost, [True] * n + [False] * m)
    x = [ZERO] * n
    for i, bi in enumerate(tab.basis):
        x[bi] = tab.rhs[i]
    value = sum((cost[j] * x[j] for j in range(n)), ZERO)
    # dual multipliers from B^T y = c_B on the original (sign-restored) rows
    bt = [[a[i][bj] for i in range(m)] for bj in tab.basis]
    y = _solve_square(bt, [cost[bj] for bj in tab.basis]) if m else []
    sign = [(-1 if Fraction(lp.b_eq[k]) < 0 else 1) for k in keep]
    y = [yi * s for yi, s in zip(y, sign)]
    return LPSolution(value, tuple(x), tuple(tab.basis), tuple(y), tuple(keep), tab.pivots)


def check_optimality(lp: LinearProgram, sol: LPSolution) -> bool:
    """Exact primal/dual certificate: feasibility of both and equal objective values."""
    n = len(lp.variables)
    if any(v < 0 for v in sol.x):
        return False
    for row, rhs in zip(lp.a_eq, lp.b_eq):
        if sum((Fraction(row[j]) * sol.x[j] for j in range(n) if row[j]), ZERO) != rhs:
            return False
    primal = sum((Fraction(lp.objective[j]) * sol.x[j] for j in range(n)), ZERO)
    dual = sum((Fraction(lp.b_eq[k]) * y for k, y in zip(sol.rows, sol.dual)), ZERO)
    if primal != dual or primal != sol.value:
        return False
    for j in range(n):
        col = sum((Fraction(lp.a_eq[k][j]) * y for k, y in zip(sol.rows, sol.dual)), ZERO)
        if col < Fraction(lp.objective[j]):
            return False
    return True
