"""
Exact linear algebra over the rationals.
"""
from fractions import Fraction
from typing import List, Optional, Sequence

Vector = List[Fraction]
Matrix = List[List[Fraction]]


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[Vector]:
    """
    Solve a square system by Gauss-Jordan elimination with exact pivots.
    Returns None when the matrix is singular.
    """
    size = len(matrix)
    rows = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        rows[col] = [v / lead for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[size] for row in rows]


def rank(vectors: Sequence[Sequence]) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    if not rows:
        return 0
    width = len(rows[0])
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][col] != 0:
                factor = rows[i][col] / rows[r][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def affinely_independent(points: Sequence[Sequence]) -> bool:
    if len(points) <= 1:
        return True
    base = points[0]
    return rank([[Fraction(a) - Fraction(b) for a, b in zip(p, base)] for p in points[1:]]) == len(points) - 1


def barycentric_origin(points: Sequence[Sequence]) -> Optional[Vector]:
    """
    Weights l_i with sum l_i p_i = 0 and sum l_i = 1 for d+1 points in
    dimension d, or None when the points are affinely dependent.
    """
    d = len(points) - 1
    matrix = [[Fraction(p[row]) for p in points] for row in range(d)]
    matrix.append([Fraction(1)] * len(points))
    return solve(matrix, [Fraction(0)] * d + [Fraction(1)])
