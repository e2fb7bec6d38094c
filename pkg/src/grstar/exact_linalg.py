"""Gaussian elimination over an exact field.

Entries may be ``Fraction`` or ``FieldScalar``; anything with exact
``+ - * /`` and a truthiness that means "non-zero" will do.
"""

from __future__ import annotations

from typing import Any, Sequence

Matrix = list[list[Any]]


def rref(rows: Sequence[Sequence[Any]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                row_r = m[r]
                m[i] = [x - f * y for x, y in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Any]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, zero, one) -> Matrix:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        vec = [zero] * ncols
        vec[f] = one
        for i, pc in enumerate(pivots):
            vec[pc] = -red[i][f]
        basis.append(vec)
    return basis


def solve(a: Sequence[Sequence[Any]], b: Sequence[Any]) -> list[Any]:
    """Solve a square non-singular system exactly."""
    n = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return [red[i][n] for i in range(n)]


def independent_subset(vectors: Sequence[Sequence[Any]]) -> list[int]:
    """Indices of a maximal linearly independent subfamily (greedy, in order)."""
    if not vectors:
        return []
    # pivots of the transpose pick out independent columns
    ncols = len(vectors)
    cols = [[vectors[j][i] for j in range(ncols)] for i in range(len(vectors[0]))]
    return rref(cols)[1]
