"""Exact integer and rational linear algebra.

Fraction-free Bareiss elimination for determinants and for solving square
systems exactly.  Everything here works on plain Python ints / Fractions so
results stay exact for arbitrarily large entries (cofactors of Laplacians
grow fast even on small graphs).
"""

from __future__ import annotations

from fractions import Fraction


def _as_int_rows(matrix):
    """Copy a matrix into integer rows, clearing denominators row by row.

    Row scaling by a positive integer preserves determinant sign, singularity
    and solution sets of [A | B] systems; the returned scale list holds the
    factor applied to each row (needed to undo the scaling in determinants).
    """
    rows = []
    scales = []
    for row in matrix:
        row = [Fraction(x) for x in row]
        mult = 1
        for x in row:
            d = x.denominator
            g = _gcd(mult, d)
            mult = mult // g * d
        rows.append([int(x * mult) for x in row])
        scales.append(mult)
    return rows, scales


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def det(matrix):
    """Exact determinant of a square matrix with int or Fraction entries."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    a, scales = _as_int_rows(matrix)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return Fraction(0)
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    num = sign * a[n - 1][n - 1]
    denom = 1
    for s in scales:
        denom *= s
    return Fraction(num, denom)


def solve(matrix, rhs_columns):
    """Solve A X = B exactly; returns X as rows of Fractions.

    `matrix` is square n x n, `rhs_columns` is an n x k right-hand side.
    Raises ValueError on a singular matrix.  Bareiss forward elimination on
    the integer-scaled augmented matrix, then Fraction back-substitution.
    """
    n = len(matrix)
    k = len(rhs_columns[0]) if n else 0
    if n == 0:
        return []
    aug = [list(matrix[i]) + list(rhs_columns[i]) for i in range(n)]
    a, _ = _as_int_rows(aug)
    width = n + k
    prev = 1
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        for i in range(col + 1, n):
            for j in range(col + 1, width):
                a[i][j] = (a[col][col] * a[i][j] - a[i][col] * a[col][j]) // prev
            a[i][col] = 0
        prev = a[col][col]
    x = [[Fraction(0)] * k for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(k):
            acc = Fraction(a[i][n + j])
            for t in range(i + 1, n):
                acc -= a[i][t] * x[t][j]
            x[i][j] = acc / a[i][i]
    return x


def invert(matrix):
    """Exact inverse as rows of Fractions; ValueError if singular."""
    n = len(matrix)
    identity = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return solve(matrix, identity)


def mat_vec(matrix, vec):
    """Matrix-vector product over exact scalars."""
    return [sum(row[j] * vec[j] for j in range(len(vec))) for row in matrix]
