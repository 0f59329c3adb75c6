"""Exact linear algebra over the integers and rationals.

All certificates in this package (basis independence, quotient ranks,
homology of integer complexes) reduce to small dense integer matrices,
so plain list-of-list matrices with arbitrary-precision entries are
enough.  Nothing here is asymptotically clever; everything is exact.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[int]]


def rank(matrix: Matrix) -> int:
    """Rank of an integer matrix, by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in matrix]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    prev_pivot = 1
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (pivot * m[i][j] - m[i][c] * m[r][j]) // prev_pivot
            m[i][c] = 0
        prev_pivot = pivot
        r += 1
        if r == rows:
            break
    return r


def nullity(matrix: Matrix, ncols: int) -> int:
    return ncols - rank(matrix)


def solve_rational(matrix: Matrix, rhs: list[int]) -> list[Fraction] | None:
    """One exact solution of ``matrix @ x = rhs``, or None if inconsistent.

    Free variables (if any) are set to zero; our callers always pass
    matrices with linearly independent columns, so the solution is then
    unique.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    a = [[Fraction(matrix[i][j]) for j in range(cols)] + [Fraction(rhs[i])] for i in range(rows)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = a[r][c]
        a[r] = [v / inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [a[i][j] - f * a[r][j] for j in range(cols + 1)]
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if a[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for (pr, pc) in pivots:
        x[pc] = a[pr][cols]
    return x


def smith_normal_form(matrix: Matrix) -> list[int]:
    """Nonzero elementary divisors of an integer matrix, in divisibility order."""
    m = [row[:] for row in matrix]
    if not m or not m[0]:
        return []
    rows, cols = len(m), len(m[0])
    divisors: list[int] = []
    top = 0
    left = 0
    while top < rows and left < cols:
        pivot = _find_pivot(m, top, left)
        if pivot is None:
            break
        pi, pj = pivot
        m[top], m[pi] = m[pi], m[top]
        for row in m:
            row[left], row[pj] = row[pj], row[left]
        while True:
            # clear the pivot column with row operations
            for i in range(top + 1, rows):
                while m[i][left] != 0:
                    q = m[i][left] // m[top][left]
                    for j in range(left, cols):
                        m[i][j] -= q * m[top][j]
                    if m[i][left] != 0:
                        m[top], m[i] = m[i], m[top]
            # then the pivot row with column operations
            for j in range(left + 1, cols):
                while m[top][j] != 0:
                    q = m[top][j] // m[top][left]
                    for i in range(top, rows):
                        m[i][j] -= q * m[i][left]
                    if m[top][j] != 0:
                        for row in m:
                            row[left], row[j] = row[j], row[left]
            if all(m[i][left] == 0 for i in range(top + 1, rows)) and all(
                m[top][j] == 0 for j in range(left + 1, cols)
            ):
                break
        divisors.append(abs(m[top][left]))
        top += 1
        left += 1
    # enforce d_1 | d_2 | ... (gcd/lcm swaps)
    changed = True
    while changed:
        changed = False
        for i in range(len(divisors) - 1):
            a, b = divisors[i], divisors[i + 1]
            if b % a != 0:
                g = _gcd(a, b)
                divisors[i], divisors[i + 1] = g, a * b // g
                changed = True
    return divisors


def _find_pivot(m: Matrix, top: int, left: int) -> tuple[int, int] | None:
    best = None
    for i in range(top, len(m)):
        for j in range(left, len(m[0])):
            if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                best = (i, j)
    return best


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
