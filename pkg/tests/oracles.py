"""Independent oracles the tests check the library against.

These deliberately avoid the library's algorithmic shortcuts: the Tsirelson
oracle enumerates arbitrary successive block subsets (not only interval
runs), the triangular-solve oracle runs dense Gaussian elimination, and the
dual-norm oracle enumerates polytope vertices.  Values computed here are
exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from bdspace.families import is_member


def bf_tsirelson(items: tuple, family, c: Fraction, memo: dict) -> Fraction:
    """Brute-force maximization over all admissible partition trees.

    ``items`` is a sorted tuple of (coordinate, magnitude) pairs; partition
    tree values depend only on the magnitudes (leaves contribute absolute
    values, inner nodes nonnegative sums), so callers canonicalize signs.
    Blocks range over arbitrary successive subsets of the support: a covered
    subset is chosen and then cut into consecutive runs.
    """
    got = memo.get(items)
    if got is not None:
        return got
    best = max((v for _, v in items), default=Fraction(0))
    n = len(items)
    full = tuple(range(n))
    for size in range(1, n + 1):
        for T in itertools.combinations(range(n), size):
            # cut T into consecutive runs: breakpoints after any gap position
            for mask in range(1 << (size - 1)) if size > 1 else (0,):
                if T == full and mask == 0:
                    continue  # the trivial single block of everything
                parts = [[T[0]]]
                for i in range(1, size):
                    if mask >> (i - 1) & 1:
                        parts.append([T[i]])
                    else:
                        parts[-1].append(T[i])
                minima = [items[p[0]][0] for p in parts]
                if not is_member(minima, family):
                    continue
                total = Fraction(0)
                for p in parts:
                    sub = tuple(items[i] for i in p)
                    total += bf_tsirelson(sub, family, c, memo)
                val = c * total
                if val > best:
                    best = val
    memo[items] = best
    return best


def dense_unitriangular_solve(order: list, cstar_rows: dict, target: dict
                              ) -> dict:
    """Solve sum a_g d_g = target by dense elimination, d_g = e_g - c_g.

    ``order`` lists indices in a rank-compatible total order; rows are the
    correction vectors in unit-vector coordinates.
    """
    n = len(order)
    pos = {g: i for i, g in enumerate(order)}
    # column j holds the coordinates of d_{order[j]}
    M = [[Fraction(0)] * n for _ in range(n)]
    for j, g in enumerate(order):
        M[pos[g]][j] += 1
        for i, v in cstar_rows[g].items():
            M[pos[i]][j] -= v
    b = [Fraction(0)] * n
    for i, v in target.items():
        b[pos[i]] = Fraction(v)
    a = [Fraction(0)] * n
    for j in range(n - 1, -1, -1):
        aj = b[pos[order[j]]] / M[pos[order[j]]][j]
        a[j] = aj
        if aj:
            for i in range(n):
                if M[i][j]:
                    b[i] -= M[i][j] * aj
    return {order[j]: a[j] for j in range(n) if a[j]}


def count_schreier1(n: int) -> int:
    """|{F in S_1 : F subset of [1, n]}| by direct enumeration."""
    count = 1  # empty set
    for size in range(1, n + 1):
        for F in itertools.combinations(range(1, n + 1), size):
            if len(F) <= F[0]:
                count += 1
    return count


def polytope_vertices(constraints: list[list[Fraction]], dim: int
                      ) -> list[list[Fraction]]:
    """Vertices of { x : |a . x| <= 1 for each constraint row }."""
    rows = []
    for a in constraints:
        rows.append(([Fraction(v) for v in a], Fraction(1)))
        rows.append(([-Fraction(v) for v in a], Fraction(1)))
    verts = []
    for combo in itertools.combinations(range(len(rows)), dim):
        A = [rows[i][0][:] for i in combo]
        b = [rows[i][1] for i in combo]
        x = _solve_square(A, b)
        if x is None:
            continue
        if all(sum(c * v for c, v in zip(r, x)) <= bb + 0
               for r, bb in rows):
            if x not in verts:
                verts.append(x)
    return verts


def _solve_square(A, b):
    n = len(A)
    M = [row[:] + [bb] for row, bb in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]
