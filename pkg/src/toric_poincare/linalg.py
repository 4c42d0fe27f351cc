"""Exact integer and rational linear algebra on small dense matrices.

Matrices are lists of rows of Python ints.  Nothing here is fast; the
matrices in play are at most a few dozen entries on a side.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matvec(a: Sequence[Sequence[int]], x: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(ai * xi for ai, xi in zip(row, x)) for row in a)


def elementary_divisors(a: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of ``a``.

    The length of the result is the rank of ``a``; each entry divides the next.
    """
    m = [list(map(int, row)) for row in a]
    if not m or not m[0]:
        return []
    rows, cols = len(m), len(m[0])
    divisors = []
    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry in the remaining block as pivot
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i, j = pivot
        m[t], m[i] = m[i], m[t]
        for row in m:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = m[t][t]
            for i in range(t + 1, rows):
                q = m[i][t] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                if m[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = m[t][j] // p
                if q:
                    for row in m:
                        row[j] -= q * row[t]
                if m[t][j]:
                    done = False
            if done:
                # the pivot must divide the whole remaining block
                bad = next(
                    (i for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                m[t] = [x + y for x, y in zip(m[t], m[bad])]
                done = False
            if not done:
                # move the smallest nonzero entry of row/column t into the pivot
                best = (t, t)
                for i in range(t, rows):
                    if m[i][t] and abs(m[i][t]) < abs(m[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t, cols):
                    if m[t][j] and abs(m[t][j]) < abs(m[best[0]][best[1]]):
                        best = (t, j)
                bi, bj = best
                m[t], m[bi] = m[bi], m[t]
                for row in m:
                    row[t], row[bj] = row[bj], row[t]
        divisors.append(abs(m[t][t]))
        t += 1
    return divisors


def rank(a: Sequence[Sequence[int]]) -> int:
    return len(_row_echelon([[Fraction(x) for x in row] for row in a])[1])


def _row_echelon(m: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def independent_rows(a: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a greedily chosen maximal set of linearly independent rows."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    for i, row in enumerate(a):
        trial = basis + [[Fraction(x) for x in row]]
        if rank(trial) > len(basis):
            basis = trial
            chosen.append(i)
    return chosen


def solve_rational(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction] | None:
    """Unique solution of ``a x = b`` when ``a`` has full column rank, else None.

    Returns None when the system is inconsistent.  Raises ValueError when the
    columns are dependent (solution not unique).
    """
    if not a:
        return []
    cols = len(a[0])
    aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = _row_echelon(aug)
    if cols in pivots:
        return None
    if len(pivots) < cols:
        raise ValueError("columns are linearly dependent; solution not unique")
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = red[r][cols]
    return x


def determinant(a: Sequence[Sequence[int]]) -> int:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    assert det.denominator == 1
    return int(det)


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
