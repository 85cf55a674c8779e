"""Exact rational simplex for small equality-form programs.

Solves ``A x = b, x >= 0`` feasibility and linear optimization over the same
region, entirely in ``Fraction`` arithmetic with Bland's rule, so verdicts on
boundary cases are exact and the method terminates.  Infeasibility comes with
a Farkas certificate ``y`` satisfying ``y A >= 0`` and ``y b < 0``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import EngineError

ZERO = Fraction(0)
ONE = Fraction(1)


class _Tableau:
    """Dense simplex tableau: rows of [A | b] kept canonical for the basis."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.m = len(rows)
        self.ncols = len(rows[0]) - 1 if rows else 0

    def pivot(self, r: int, c: int, zrow: list[Fraction]) -> None:
        row = self.rows[r]
        inv = ONE / row[c]
        row = [v * inv for v in row]
        self.rows[r] = row
        for i in range(self.m):
            if i != r and self.rows[i][c] != 0:
                factor = self.rows[i][c]
                self.rows[i] = [a - factor * b for a, b in zip(self.rows[i], row)]
        factor = zrow[c]
        if factor != 0:
            zrow[:] = [a - factor * b for a, b in zip(zrow, row)]
        self.basis[r] = c

    def minimize(self, cost: list[Fraction]) -> Fraction:
        """Minimize cost by Bland's rule; returns the optimal value.

        The objective row starts as [-cost | 0] and is kept canonical, so at
        an optimum its last entry is the objective value.  Unboundedness
        raises, but the feasible sets used here are bounded by construction.
        """
        zrow = [-c for c in cost] + [ZERO]
        for r, bvar in enumerate(self.basis):
            factor = zrow[bvar]
            if factor != 0:
                zrow = [a - factor * b for a, b in zip(zrow, self.rows[r])]
        while True:
            enter = -1
            for j in range(self.ncols):
                if zrow[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return zrow[-1]
            leave = -1
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rows[i][-1] / a
                    if best is None or ratio < best or \
                            (ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                raise EngineError("linear program is unbounded")
            self.pivot(leave, enter, zrow)

    def solution(self, nvars: int) -> list[Fraction]:
        x = [ZERO] * nvars
        for r, bvar in enumerate(self.basis):
            if bvar < nvars:
                x[bvar] = self.rows[r][-1]
        return x


def _phase_one(A: list[list[Fraction]], b: list[Fraction]) -> tuple[_Tableau, Fraction]:
    m = len(A)
    n = len(A[0])
    rows = []
    for i in range(m):
        coeffs = list(A[i])
        rhs = b[i]
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
        rows.append(coeffs + [ONE if j == i else ZERO for j in range(m)] + [rhs])
    tab = _Tableau(rows, [n + i for i in range(m)])
    cost = [ZERO] * n + [ONE] * m
    value = tab.minimize(cost)
    return tab, value


def _structural_tableau(tab: _Tableau, n: int) -> _Tableau:
    """Strip artificial columns after a successful phase one.

    Artificial variables still basic at zero are pivoted onto structural
    columns where possible; rows where that fails are redundant and dropped.
    """
    dummy = [ZERO] * (tab.ncols + 1)
    for r in range(tab.m):
        if tab.basis[r] >= n:
            for j in range(n):
                if tab.rows[r][j] != 0:
                    tab.pivot(r, j, dummy)
                    break
    rows = []
    basis = []
    for r in range(tab.m):
        if tab.basis[r] < n:
            rows.append(tab.rows[r][:n] + [tab.rows[r][-1]])
            basis.append(tab.basis[r])
    return _Tableau(rows, basis)


def feasible_point(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Some x >= 0 with A x = b, or None."""
    if not A:
        return []
    tab, value = _phase_one(A, b)
    if value != 0:
        return None
    return tab.solution(len(A[0]))


def optimize(A: list[list[Fraction]], b: list[Fraction], c: list[Fraction],
             maximize: bool = False) -> tuple[Fraction, list[Fraction]] | None:
    """Optimize c.x over {A x = b, x >= 0}; None when infeasible."""
    if not A:
        return ZERO, []
    n = len(A[0])
    tab, value = _phase_one(A, b)
    if value != 0:
        return None
    tab = _structural_tableau(tab, n)
    cost = [-v for v in c] if maximize else list(c)
    opt = tab.minimize(cost)
    x = tab.solution(n)
    return (-opt if maximize else opt), x


def farkas_certificate(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """A vector y with y A >= 0 and y b = -1, for infeasible A x = b, x >= 0.

    Solved as a feasibility problem in its own right: write y = u - v with
    u, v >= 0 and add surplus variables for the inequalities.
    """
    m = len(A)
    n = len(A[0])
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for j in range(n):
        row = [A[i][j] for i in range(m)] + [-A[i][j] for i in range(m)]
        row += [-(ONE if k == j else ZERO) for k in range(n)]
        rows.append(row)
        rhs.append(ZERO)
    rows.append([b[i] for i in range(m)] + [-b[i] for i in range(m)] + [ZERO] * n)
    rhs.append(-ONE)
    point = feasible_point(rows, rhs)
    if point is None:
        raise EngineError("no Farkas certificate found for an infeasible system")
    y = [point[i] - point[m + i] for i in range(m)]
    for j in range(n):
        if sum(y[i] * A[i][j] for i in range(m)) < 0:
            raise EngineError("invalid Farkas certificate")
    if sum(y[i] * b[i] for i in range(m)) >= 0:
        raise EngineError("invalid Farkas certificate")
    return y
