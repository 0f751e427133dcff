"""Two-phase tableau simplex with Bland's rule.

The same code runs over :class:`fractions.Fraction` (exact pivoting, every
comparison exact) or over Python floats with an absolute feasibility
tolerance. Problems here are tiny (tens of variables), so a dense tableau
held in lists is adequate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list | None = None
    fun: object = None

    @property
    def ok(self):
        return self.status == OPTIMAL


def to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    # floats go through their shortest decimal form: 0.1 -> 1/10
    return Fraction(repr(float(v)))


class _Tableau:
    def __init__(self, rows, rhs, basis, exact, tol):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.exact = exact
        self.tol = 0 if exact else tol

    def pivot(self, r, c):
        row = self.rows[r]
        inv = 1 / row[c]
        row[:] = [v * inv for v in row]
        self.rhs[r] *= inv
        if not self.exact:
            row[c] = 1.0
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f != 0:
                other[:] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
                if not self.exact:
                    other[c] = 0.0
                    if abs(self.rhs[i]) < 1e-13:
                        self.rhs[i] = 0.0
        self.basis[r] = c

    def reduced_costs(self, cost):
        ncols = len(cost)
        red = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                row = self.rows[i]
                for j in range(ncols):
                    red[j] -= cb * row[j]
        return red

    def run(self, cost, allowed):
        """Minimize ``cost . x`` from the current basic feasible solution."""
        tol = self.tol
        max_iter = 50 * (len(self.rows) + len(cost)) + 100
        for _ in range(max_iter):
            red = self.reduced_costs(cost)
            enter = next((j for j in range(len(cost)) if allowed[j] and red[j] < -tol), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > tol:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)
        raise RuntimeError("simplex iteration limit reached")


def solve_lp(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, free=None,
             exact=False, tol=FLOAT_TOL):
    """Minimize ``c . x`` subject to equality and ``<=`` rows and ``x >= 0``.

    Variables listed in ``free`` are unrestricted in sign (internally split
    into a difference of non-negative parts). Returns an :class:`LPResult`
    whose ``x`` has the original variable count.
    """
    nvar = len(c)
    free = sorted(set(free or ()))
    conv = to_fraction if exact else float
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    A_eq = [] if A_eq is None else [list(map(conv, r)) for r in A_eq]
    b_eq = [] if b_eq is None else list(map(conv, b_eq))
    A_ub = [] if A_ub is None else [list(map(conv, r)) for r in A_ub]
    b_ub = [] if b_ub is None else list(map(conv, b_ub))
    cost = list(map(conv, c))

    # columns: original vars, negative parts of free vars, slacks of <= rows
    nfree = len(free)
    nslack = len(A_ub)
    ncore = nvar + nfree + nslack

    def expand(row):
        return row + [-row[j] for j in free]

    rows, rhs = [], []
    for k, (r, b) in enumerate(zip(A_ub, b_ub)):
        slack = [zero] * nslack
        slack[k] = one
        rows.append(expand(r) + slack)
        rhs.append(b)
    for r, b in zip(A_eq, b_eq):
        rows.append(expand(r) + [zero] * nslack)
        rhs.append(b)
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    m = len(rows)
    full_cost = expand(cost) + [zero] * nslack
    # phase one: artificials on every row
    for i in range(m):
        art = [zero] * m
        art[i] = one
        rows[i] = rows[i] + art
    tab = _Tableau(rows, rhs, list(range(ncore, ncore + m)), exact, tol)
    phase1 = [zero] * ncore + [one] * m
    allowed = [True] * (ncore + m)
    tab.run(phase1, allowed)
    infeas = sum(tab.rhs[i] for i in range(m) if tab.basis[i] >= ncore)
    if infeas > (0 if exact else tol * max(1.0, float(max(map(abs, rhs), default=0)))):
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] >= ncore:
            col = next((j for j in range(ncore) if abs(tab.rows[i][j]) > tab.tol), None)
            if col is None:
                continue
            tab.pivot(i, col)
        keep.append(i)
    tab.rows = [tab.rows[i][:ncore] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    status = tab.run(full_cost, [True] * ncore)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    z = [zero] * ncore
    for i, b in enumerate(tab.basis):
        z[b] = tab.rhs[i]
    x = z[:nvar]
    for k, j in enumerate(free):
        x[j] = x[j] - z[nvar + k]
    fun = sum((ci * xi for ci, xi in zip(cost, x)), zero)
    return LPResult(OPTIMAL, x, fun)
