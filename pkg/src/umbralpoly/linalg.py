"""Small dense linear algebra used by the moment and operator code.

Exact routines work on lists of Fractions; float routines defer to numpy.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InconsistentSystemError


def _lcm_denominators(rows) -> int:
    out = 1
    for row in rows:
        for v in row:
            out = math.lcm(out, Fraction(v).denominator)
    return out


def _bareiss(m: list[list[int]], pivoting: bool) -> tuple[list[int], int]:
    """In-place fraction-free elimination on an integer matrix.

    Returns the successive pivots (which are leading principal minors when no
    row swap happened) and the sign from row swaps. Stops at the first zero
    pivot when ``pivoting`` is false.
    """
    n = len(m)
    pivots = []
    sign = 1
    prev = 1
    for k in range(n):
        if m[k][k] == 0:
            if not pivoting:
                break
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                pivots.append(0)
                return pivots, sign
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        pivots.append(pivot)
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return pivots, sign


def det_exact(matrix: Sequence[Sequence]) -> Fraction:
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    scale = _lcm_denominators(matrix)
    m = [[int(Fraction(v) * scale) for v in row] for row in matrix]
    pivots, sign = _bareiss(m, pivoting=True)
    if len(pivots) < n or pivots[-1] == 0:
        return Fraction(0)
    return Fraction(sign * pivots[-1], scale**n)


def leading_minors_exact(matrix: Sequence[Sequence]) -> list[Fraction]:
    """All leading principal minors ``det(M[:k, :k])`` for ``k = 1..n``."""
    n = len(matrix)
    scale = _lcm_denominators(matrix)
    m = [[int(Fraction(v) * scale) for v in row] for row in matrix]
    pivots, _ = _bareiss(m, pivoting=False)
    out = [Fraction(p, scale ** (k + 1)) for k, p in enumerate(pivots)]
    # past a vanishing minor the unpivoted scheme stops; finish directly
    for k in range(len(out), n):
        out.append(det_exact([row[: k + 1] for row in matrix[: k + 1]]))
    return out


def rref_exact(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace_exact(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right nullspace."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref_exact(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def solve_exact(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """A solution of ``a @ x = b`` (free variables set to zero).

    Raises :class:`InconsistentSystemError` when none exists.
    """
    ncols = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    m, pivots = rref_exact(aug)
    if ncols in pivots:
        raise InconsistentSystemError("linear system is inconsistent")
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = m[r][ncols]
    return x


def solve_float(a, b, rcond: float = 1e-12) -> tuple[np.ndarray, float]:
    """Least-squares solution and its relative residual."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    x, *_ = np.linalg.lstsq(a, b, rcond=rcond)
    denom = max(np.linalg.norm(b), np.linalg.norm(a, 2) * np.linalg.norm(x), 1e-300)
    return x, float(np.linalg.norm(a @ x - b) / denom)


def nullspace_float(a, rtol: float) -> tuple[np.ndarray, float]:
    """Right null vectors by SVD plus the 2-norm condition estimate.

    A singular value counts as zero when it is at most ``rtol`` times the
    largest one.
    """
    a = np.asarray(a, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    ncols = a.shape[1]
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    cond = float(smax / s[-1]) if len(s) == ncols and s[-1] > 0 else math.inf
    return vh[rank:].conj().T, cond
