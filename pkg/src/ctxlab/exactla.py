"""Small dense exact-rational linear algebra: Gaussian elimination only.

Deterministic pivoting (first nonzero in column order) so every caller
gets reproducible results.
"""

from __future__ import annotations

from .rational import ZERO


def row_reduce(matrix, rhs):
    """Reduce [matrix | rhs] to row echelon form in place semantics.

    Returns (reduced_rows, reduced_rhs, pivot_cols, consistent) where the
    reduced system has full row rank and the same solution set as the
    input whenever consistent is True.
    """
    rows = [list(r) for r in matrix]
    b = list(rhs)
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
            b[r], b[pivot] = b[pivot], b[r]
        inv = 1 / rows[r][c]
        if inv != 1:
            rows[r] = [x * inv for x in rows[r]]
            b[r] = b[r] * inv
        prow = rows[r]
        pb = b[r]
        for i in range(m):
            if i == r:
                continue
            f = rows[i][c]
            if f:
                rows[i] = [a - f * p if p else a for a, p in zip(rows[i], prow)]
                b[i] = b[i] - f * pb
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    consistent = all(b[i] == 0 for i in range(r, m))
    return rows[:r], b[:r], pivot_cols, consistent


def rank(matrix) -> int:
    if not matrix:
        return 0
    reduced, _, pivots, _ = row_reduce(matrix, [ZERO] * len(matrix))
    return len(pivots)


def solve_square(matrix, rhs):
    """Solve an n x n system exactly; None when singular."""
    n = len(matrix)
    rows = [list(r) + [v] for r, v in zip(matrix, rhs)]
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            return None
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
        inv = 1 / rows[c][c]
        if inv != 1:
            rows[c] = [x * inv for x in rows[c]]
        prow = rows[c]
        for i in range(n):
            if i == c:
                continue
            f = rows[i][c]
            if f:
                rows[i] = [a - f * p if p else a for a, p in zip(rows[i], prow)]
    return [rows[i][n] for i in range(n)]


def mat_vec(matrix, vec):
    out = []
    for row in matrix:
        acc = ZERO
        for a, x in zip(row, vec):
            if a and x:
                acc += a * x
        out.append(acc)
    return out


def dot(u, v):
    acc = ZERO
    for a, x in zip(u, v):
        if a and x:
            acc += a * x
    return acc
