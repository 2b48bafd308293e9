"""Exact rational linear solving (Gaussian elimination over Fraction)."""

from __future__ import annotations

from fractions import Fraction


def solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve A x = b exactly.

    Returns the unique solution, or None when the system is inconsistent
    or underdetermined (rank below the number of unknowns).
    """
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(rows, rhs)]
    nrows = len(aug)
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols] != 0:
            return None  # inconsistent
    if len(pivot_cols) < ncols:
        return None  # underdetermined
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivot_cols):
        sol[c] = aug[i][ncols]
    return sol


def poly_eval(coeffs: list[Fraction], x: int) -> Fraction:
    """Evaluate a polynomial given low-to-high coefficients."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
