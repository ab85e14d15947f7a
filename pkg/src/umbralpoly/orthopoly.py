"""Monic orthogonal polynomial systems: construction, recurrences, Gram checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DegenerateFunctionalError, NumericallySingularError
from .moments import MomentSequence, bilinear
from .polynomial import Polynomial, as_polynomial
from .scalars import DEFAULT_TOL, EXACT, Scalar, Tolerance, coerce, is_zero, mode_of, one, to_json, zero


@dataclass(frozen=True)
class MonicPolySystem:
    """``P_0 .. P_N`` with ``P_{n+1} = (x - b_n) P_n - u_n P_{n-1}``.

    ``b`` holds ``b_0 .. b_{N-1}``; ``u`` holds ``u_0 .. u_{N-1}`` where the
    unused ``u_0`` is stored as zero; ``h`` holds the norms ``h_0 .. h_N``.
    """

    polys: tuple
    b: tuple
    u: tuple
    h: tuple
    mode: str = EXACT

    @property
    def N(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, n: int) -> Polynomial:
        return self.polys[n]

    def __len__(self):
        return len(self.polys)

    def to_json(self) -> dict:
        return {
            "b": [to_json(v) for v in self.b],
            "u": [to_json(v) for v in self.u],
            "h": [to_json(v) for v in self.h],
            "polys": [p.to_json() for p in self.polys],
        }


def _recurrence_from_polys(polys: Sequence[Polynomial], mode: str):
    # match the x^n and x^{n-1} coefficients of P_{n+1} = (x - b_n) P_n - u_n P_{n-1}
    b, u = [], [zero(mode)]
    for n in range(len(polys) - 1):
        pn, pn1 = polys[n], polys[n + 1]
        bn = pn[n - 1] - pn1[n]
        b.append(bn)
        if n >= 1:
            u.append(pn[n - 2] - bn * pn[n - 1] - pn1[n - 1])
    return b, u[: len(b)] if b else u


def monic_ops_from_moments(g: MomentSequence, N: int, tol: Tolerance | None = None) -> MonicPolySystem:
    """Monic OPS ``P_0 .. P_N`` of the functional with moments ``g``.

    Gaussian elimination without pivoting on the Hankel matrix
    ``H = L D L^T``: row ``n`` of ``L^{-1}`` holds the coefficients of ``P_n``
    and the pivots are the norms ``h_n = Delta_{n+1} / Delta_n``. A vanishing
    pivot means a vanishing Hankel determinant and raises
    :class:`DegenerateFunctionalError` with the 1-based Hankel index.
    """
    tol = tol or DEFAULT_TOL
    mode = g.mode
    size = N + 1
    vals = g.prefix(2 * size - 1)
    H = [[vals[i + k] for k in range(size)] for i in range(size)]
    # rows of `coef` track L^{-1}; rows of `work` track L^{-1} H (upper triangular)
    coef = [[one(mode) if i == k else zero(mode) for k in range(size)] for i in range(size)]
    work = [row[:] for row in H]
    h = []
    for n in range(size):
        pivot = work[n][n]
        row_scale = max(abs(v) for v in H[n]) if mode != EXACT else 1.0
        if is_zero(pivot, tol, scale=row_scale):
            if mode == EXACT:
                raise DegenerateFunctionalError(
                    f"Hankel determinant Delta_{n + 1} vanishes (degenerate functional)", index=n + 1
                )
            raise NumericallySingularError(
                f"Hankel pivot h_{n} = {abs(pivot):.3g} is below tolerance relative to the moments "
                f"(Delta_{n + 1} numerically zero; rerun in exact mode)",
                index=n + 1,
            )
        h.append(pivot)
        for i in range(n + 1, size):
            f = work[i][n] / pivot
            if f == 0:
                continue
            wi, wn = work[i], work[n]
            for k in range(n, size):
                wi[k] -= f * wn[k]
            ci, cn = coef[i], coef[n]
            for k in range(n + 1):
                ci[k] -= f * cn[k]
    polys = tuple(Polynomial(coef[n][: n + 1], mode) for n in range(size))
    b, u = _recurrence_from_polys(polys, mode)
    return MonicPolySystem(polys, tuple(b), tuple(u), tuple(h), mode)


def _seq(s, n):
    return s(n) if callable(s) else s[n]


def ops_from_recurrence(b, u, N: int, mode: str | None = None, tol: Tolerance | None = None) -> MonicPolySystem:
    """Forward iteration of ``P_{n+1} = (x - b_n) P_n - u_n P_{n-1}``.

    ``b`` and ``u`` are sequences or callables indexed by ``n`` (``u[0]`` is
    never read). Norms are reported for the normalized functional, ``h_0 = 1``.
    """
    if mode is None:
        mode = mode_of(_seq(b, 0))
    bs = [coerce(_seq(b, n), mode) for n in range(N)]
    us = [zero(mode)] + [coerce(_seq(u, n), mode) for n in range(1, N)]
    for n in range(1, N):
        if is_zero(us[n], tol):
            raise DegenerateFunctionalError(f"u_{n} = 0: degenerate recurrence", index=n + 1)
    x = Polynomial([zero(mode), one(mode)], mode)
    polys = [Polynomial([one(mode)], mode)]
    prev = Polynomial([], mode)
    for n in range(N):
        nxt = (x - bs[n]) * polys[n] - prev * us[n]
        prev = polys[n]
        polys.append(nxt)
    h = [one(mode)]
    for n in range(1, N):
        h.append(h[-1] * us[n])
    try:
        h.append(h[-1] * coerce(_seq(u, N), mode))
    except (IndexError, KeyError):
        pass
    return MonicPolySystem(tuple(polys), tuple(bs), tuple(us), tuple(h), mode)


@dataclass
class GramReport:
    passed: bool
    size: int
    worst_cell: tuple | None
    worst_value: Scalar | None
    zero_diagonal: int | None
    matrix: list = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "size": self.size,
            "worst_cell": list(self.worst_cell) if self.worst_cell else None,
            "worst_value": to_json(self.worst_value) if self.worst_value is not None else None,
            "zero_diagonal": self.zero_diagonal,
        }


def gram_matrix(polys: Sequence, g: MomentSequence) -> list[list]:
    polys = [as_polynomial(p, g.mode) for p in polys]
    n = len(polys)
    G = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            G[i][j] = G[j][i] = bilinear(g, polys[i], polys[j])
    return G


def gram_check(polys: Sequence, g: MomentSequence, tol: Tolerance | None = None) -> GramReport:
    """Orthogonality test of ``polys`` against ``g``.

    Exact mode demands zero off-diagonal entries. Float mode accepts
    ``|G_ij| <= abs_eps + rel_eps * sqrt(|G_ii G_jj|)``. Diagonal entries must be
    nonzero (above ``abs_eps`` in float mode). ``worst_cell`` is the
    off-diagonal entry of largest magnitude (row-major on ties), reported
    whenever it is nonzero.
    """
    tol = tol or DEFAULT_TOL
    G = gram_matrix(polys, g)
    n = len(G)
    exact = g.mode == EXACT
    zero_diag = next((i for i in range(n) if is_zero(G[i][i], tol)), None)
    worst, worst_val, worst_ratio, ok = None, None, 0.0, True
    for i in range(n):
        for j in range(i + 1, n):
            v = G[i][j]
            if v == 0:
                continue
            if exact:
                bad = True
                ratio = abs(v)
            else:
                allowed = tol.abs_eps + tol.rel_eps * abs(G[i][i] * G[j][j]) ** 0.5
                bad = abs(v) > allowed
                ratio = abs(v) / allowed if allowed > 0 else float("inf")
            if ratio > worst_ratio:
                worst, worst_val, worst_ratio = (i, j), v, ratio
            ok = ok and not bad
    return GramReport(ok and zero_diag is None, n, worst, worst_val, zero_diag, G)


def evaluate_by_recurrence(system: MonicPolySystem, n: int, x):
    """``P_n(x)`` from the stored recurrence coefficients."""
    prev, cur = zero(system.mode), one(system.mode)
    for k in range(n):
        prev, cur = cur, (x - system.b[k]) * cur - system.u[k] * prev
    return cur
