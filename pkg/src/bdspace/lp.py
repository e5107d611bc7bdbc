"""Small exact linear programming over the rationals.

Two-phase primal simplex with Bland's rule, every pivot carried out in
`fractions.Fraction` arithmetic.  Intended for the modest problem sizes this
package produces (dozens of variables); termination is guaranteed by Bland's
rule and results are exact, which is what the certificate-style checks
require.  scipy's solvers are floating point and therefore unusable here.

Problems are stated as

    maximize    c . x
    subject to  A_ub x <= b_ub,   A_eq x = b_eq,   x >= 0.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(T, basis, row, col):
    piv = T[row][col]
    inv = Fraction(1) / piv
    T[row] = [v * inv for v in T[row]]
    for r, line in enumerate(T):
        if r != row and line[col]:
            f = line[col]
            prow = T[row]
            T[r] = [a - f * b for a, b in zip(line, prow)]
    basis[row] = col


def _simplex(T, basis, ncols):
    """Maximize with objective in the last row; Bland's rule throughout."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] > 0), None)
        if col is None:
            return
        best = None
        for r in range(m):
            a = T[r][col]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best[0] or (
                        ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise Unbounded()
        _pivot(T, basis, best[1], col)


def maximize(c: Sequence, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Solve the LP; returns (optimal value, solution list).

    Raises Infeasible or Unbounded.  All inputs may be ints or Fractions.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = []
    slack_count = len(A_ub)
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), "ub"))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), "eq"))
    m = len(rows)

    # columns: n structural, slack_count slacks, m artificials, rhs
    ncols = n + slack_count + m
    T = []
    basis = []
    si = 0
    for r, (a, b, kind) in enumerate(rows):
        if b < 0:
            a = [-v for v in a]
            b = -b
            kind = "eq" if kind == "eq" else "lb"  # flipped <= becomes >=
        line = a + [Fraction(0)] * (slack_count + m) + [b]
        if kind == "ub":
            line[n + si] = Fraction(1)
            si += 1
        elif kind == "lb":
            line[n + si] = Fraction(-1)
            si += 1
        line[n + slack_count + r] = Fraction(1)
        T.append(line)
        basis.append(n + slack_count + r)

    # phase 1: minimize sum of artificials
    obj = [Fraction(0)] * (ncols + 1)
    for r in range(m):
        for j in range(ncols + 1):
            obj[j] += T[r][j]
    for j in range(n + slack_count, ncols):
        obj[j] = Fraction(0)
    T.append(obj)
    _simplex(T, basis, n + slack_count)
    if T[-1][-1] != 0:
        raise Infeasible()
    T.pop()

    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n + slack_count:
            col = next((j for j in range(n + slack_count) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)

    # phase 2
    obj = [Fraction(0)] * (ncols + 1)
    for j in range(n):
        obj[j] = c[j]
    for r in range(m):
        if basis[r] < n and obj[basis[r]]:
            f = obj[basis[r]]
            obj = [a - f * b for a, b in zip(obj, T[r])]
    # reduced costs must be zero on all basic columns
    for r in range(m):
        if obj[basis[r]]:
            f = obj[basis[r]]
            obj = [a - f * b for a, b in zip(obj, T[r])]
    T.append(obj)
    _simplex(T, basis, n + slack_count)

    x = [Fraction(0)] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r][-1]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return value, x


def minimize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    value, x = maximize([-Fraction(v) for v in c], A_ub, b_ub, A_eq, b_eq)
    return -value, x
