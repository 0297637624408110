"""Exact rational linear programming by two-phase simplex with Bland's rule.

Solves  maximize c.v  subject to  A v = b, v >= 0  entirely in Fractions.
Bland's pivoting rule keeps the heavily degenerate no-signalling polytopes
from cycling; redundant equality rows are detected after phase one and
dropped.  Returned solutions are re-verified against the original data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class LPResult:
    value: Fraction
    solution: list
    basis: list
    iterations: int


class LPInfeasibleError(Exception):
    pass


class LPUnboundedError(Exception):
    pass


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    inv = ONE / piv
    tableau[row] = [entry * inv for entry in tableau[row]]
    prow = tableau[row]
    for r, trow in enumerate(tableau):
        if r == row:
            continue
        factor = trow[col]
        if factor != 0:
            tableau[r] = [e - factor * p for e, p in zip(trow, prow)]
    basis[row] = col


def _simplex_core(tableau, basis, cost, num_vars, max_iters):
    """Maximize over the current basic feasible tableau; returns iterations.

    `tableau` rows are constraint rows [a_0 .. a_{k-1} | rhs]; `cost` is the
    objective row in the same column layout (reduced in place).
    """
    iters = 0
    while True:
        # Bland: entering variable = lowest index with positive reduced cost.
        col = -1
        for j in range(num_vars):
            if cost[j] > 0:
                col = j
                break
        if col < 0:
            return iters
        # Ratio test; Bland tie-break on smallest basic variable index.
        best_row = -1
        best_ratio = None
        for r, trow in enumerate(tableau):
            arc = trow[col]
            if arc > 0:
                ratio = trow[-1] / arc
                if best_ratio is None or ratio < best_ratio or (
                        ratio == best_ratio and basis[r] < basis[best_row]):
                    best_ratio = ratio
                    best_row = r
        if best_row < 0:
            raise LPUnboundedError("objective unbounded above")
        _pivot(tableau, basis, best_row, col)
        factor = cost[col]
        if factor != 0:
            prow = tableau[best_row]
            for j in range(len(cost)):
                cost[j] -= factor * prow[j]
        iters += 1
        if iters > max_iters:
            raise RuntimeError(f"simplex exceeded {max_iters} iterations")


def maximize(objective: Sequence[Fraction],
             eq_rows: Sequence[Sequence[Fraction]],
             eq_rhs: Sequence[Fraction],
             max_iters: int = 200_000) -> LPResult:
    """Maximize objective over {v >= 0 : eq_rows v = eq_rhs}, exactly."""
    m = len(eq_rows)
    nv = len(objective)
    objective = [Fraction(c) for c in objective]
    rows = []
    rhs = []
    for row, b in zip(eq_rows, eq_rhs):
        if len(row) != nv:
            raise ValueError("constraint row length mismatch")
        row = [Fraction(e) for e in row]
        b = Fraction(b)
        if b < 0:
            row = [-e for e in row]
            b = -b
        rows.append(row)
        rhs.append(b)

    # Phase 1: artificial variable per row, minimize their sum.
    width = nv + m + 1
    tableau = []
    for r in range(m):
        line = rows[r] + [ZERO] * m + [rhs[r]]
        line[nv + r] = ONE
        tableau.append(line)
    basis = [nv + r for r in range(m)]
    # maximize -(sum of artificials); reduce cost row against initial basis
    cost = [ZERO] * width
    for r in range(m):
        for j in range(nv):
            cost[j] += tableau[r][j]
        cost[-1] += tableau[r][-1]
    it1 = _simplex_core(tableau, basis, cost, nv + m, max_iters)
    if cost[-1] != 0:
        raise LPInfeasibleError("equality system has no nonnegative solution")

    # Drive leftover artificials out of the basis; rows that cannot pivot
    # on any structural column are redundant and dropped.
    keep = []
    for r in range(len(tableau)):
        if basis[r] < nv:
            keep.append(r)
            continue
        pivot_col = next((j for j in range(nv) if tableau[r][j] != 0), None)
        if pivot_col is not None:
            _pivot(tableau, basis, r, pivot_col)
            keep.append(r)
    tableau = [tableau[r][:nv] + [tableau[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]

    # Phase 2: original objective reduced against the feasible basis.
    cost = objective + [ZERO]
    for r, b in enumerate(basis):
        factor = cost[b]
        if factor != 0:
            prow = tableau[r]
            for j in range(nv + 1):
                cost[j] -= factor * prow[j]
    it2 = _simplex_core(tableau, basis, cost, nv, max_iters)

    solution = [ZERO] * nv
    for r, b in enumerate(basis):
        solution[b] = tableau[r][-1]
    value = sum((c * v for c, v in zip(objective, solution)), ZERO)
    _verify(objective, eq_rows, eq_rhs, solution, value)
    return LPResult(value=value, solution=solution, basis=list(basis),
                    iterations=it1 + it2)


def _verify(objective, eq_rows, eq_rhs, solution, value):
    for v in solution:
        if v < 0:
            raise AssertionError("negative component in LP solution")
    for row, b in zip(eq_rows, eq_rhs):
        acc = sum((Fraction(e) * v for e, v in zip(row, solution)), ZERO)
        if acc != Fraction(b):
            raise AssertionError("LP solution violates an equality constraint")
    acc = sum((Fraction(c) * v for c, v in zip(objective, solution)), ZERO)
    if acc != value:
        raise AssertionError("LP objective mismatch")
