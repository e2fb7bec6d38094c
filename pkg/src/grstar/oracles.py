"""Independent brute-force oracles used to cross-check the algebra engines.

None of these touch the star-product code: they count pairings, lattice
paths and tridiagonal matrix powers directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence


def catalan(n: int) -> int:
    if n < 0:
        raise ValueError("catalan index must be non-negative")
    return comb(2 * n, n) // (n + 1)


def noncrossing_pairings(points: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    """Every non-crossing perfect matching of the given ordered points."""
    pts = list(points)
    if not pts:
        yield []
        return
    first = pts[0]
    for idx in range(1, len(pts), 2):
        inside, outside = pts[1:idx], pts[idx + 1:]
        for left in noncrossing_pairings(inside):
            for right in noncrossing_pairings(outside):
                yield [(first, pts[idx])] + left + right


def count_matched_pairings(word: Sequence[int]) -> int:
    """Non-crossing pairings of positions whose blocks join equal letters."""
    count = 0
    for pairing in noncrossing_pairings(range(len(word))):
        if all(word[i] == word[j] for i, j in pairing):
            count += 1
    return count


@lru_cache(maxsize=None)
def dyck_paths(length: int, height: int = 0) -> int:
    """Number of non-negative +-1 paths of the given length from height to 0."""
    if height < 0:
        return 0
    if length == 0:
        return int(height == 0)
    return dyck_paths(length - 1, height + 1) + dyck_paths(length - 1, height - 1)


def jacobi_moment(n: int, size: int | None = None) -> int:
    """<J^n e0, e0> for the free Jacobi matrix by integer vector iteration."""
    size = size if size is not None else n + 2
    vec = [0] * size
    vec[0] = 1
    for _ in range(n):
        new = [0] * size
        for i, x in enumerate(vec):
            if x:
                if i > 0:
                    new[i - 1] += x
                if i + 1 < size:
                    new[i + 1] += x
        vec = new
    return vec[0]


def semicircle_moment_numeric(n: int, points: int = 2001) -> float:
    """Quadrature of t^n against the semicircle density.

    With t = 2 cos(theta) the integrand is smooth and Simpson converges fast.
    """
    import numpy as np
    from scipy.integrate import simpson

    theta = np.linspace(0.0, np.pi, points)
    t = 2 * np.cos(theta)
    return float(simpson(t ** n * 2 * np.sin(theta) ** 2 / np.pi, x=theta))


def hankel_psd(moments: Sequence[Fraction], size: int) -> bool:
    """Leading principal minors of the Hankel matrix are non-negative."""
    for k in range(1, size + 1):
        h = [[Fraction(moments[i + j]) for j in range(k)] for i in range(k)]
        if _det(h) < 0:
            return False
    return True


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det
