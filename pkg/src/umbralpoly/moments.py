"""Moment sequences of linear functionals and the quantities built on them."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import DegenerateFunctionalError, RecurrenceBreakdownError
from .polynomial import Polynomial, as_polynomial
from .scalars import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    Scalar,
    Tolerance,
    coerce,
    common_mode,
    from_json,
    is_zero,
    one,
    to_json,
    zero,
)


class MomentSequence:
    """Lazily computed moments ``g_n = <sigma, x^n>``.

    Values are exposed normalized so that ``g[0] == 1``; the raw ``g_0`` is kept
    in :attr:`scale` and :meth:`raw` returns unnormalized values.

    ``rule(n, prefix)`` returns the raw ``g_n``; ``prefix`` is the list of raw
    values already computed, which lets recurrences build on the cache.
    ``limit`` bounds the defined indices (for finite data).
    """

    def __init__(self, rule: Callable[[int, list], Scalar], mode: str = EXACT, limit: int | None = None):
        self._rule = rule
        self.mode = mode
        self.limit = limit
        self._raw: list = []
        self._norm: list = []
        self._lock = threading.Lock()
        g0 = self.raw(0)
        if g0 == 0:
            raise DegenerateFunctionalError("g_0 = 0: functional cannot be normalized", index=1)
        self.scale = g0

    @classmethod
    def from_values(cls, values: Sequence, mode: str | None = None) -> "MomentSequence":
        values = list(values)
        if mode is None:
            mode = common_mode(*values) if values else EXACT
        vals = [coerce(v, mode) for v in values]
        return cls(lambda n, _prefix: vals[n], mode, limit=len(vals) - 1)

    @classmethod
    def from_function(cls, f: Callable[[int], Scalar], mode: str = EXACT) -> "MomentSequence":
        return cls(lambda n, _prefix: f(n), mode)

    def _extend(self, n: int):
        if self.limit is not None and n > self.limit:
            raise IndexError(f"moment g_{n} requested but only g_0..g_{self.limit} are defined")
        with self._lock:
            while len(self._raw) <= n:
                k = len(self._raw)
                value = coerce(self._rule(k, self._raw), self.mode)
                self._raw.append(value)
                self._norm.append(one(self.mode) if k == 0 else value / self._raw[0])

    def raw(self, n: int) -> Scalar:
        self._extend(n)
        return self._raw[n]

    def __getitem__(self, n: int) -> Scalar:
        if n < 0:
            raise IndexError("negative moment index")
        self._extend(n)
        return self._norm[n]

    def prefix(self, n: int) -> list:
        """Normalized ``g_0 .. g_{n-1}``."""
        if n > 0:
            self._extend(n - 1)
        return list(self._norm[:n])

    def raw_prefix(self, n: int) -> list:
        if n > 0:
            self._extend(n - 1)
        return list(self._raw[:n])

    def scaled(self, p) -> "MomentSequence":
        """``g_n -> p**n g_n`` (dilation of the functional)."""
        p = coerce(p, self.mode)
        return MomentSequence(lambda n, _pre: p**n * self.raw(n), self.mode, self.limit)

    def to_json(self, n: int) -> list:
        return [to_json(v) for v in self.prefix(n)]

    def __repr__(self):
        shown = ", ".join(str(v) for v in self._norm[:6])
        return f"MomentSequence({self.mode}: {shown}, ...)"


@dataclass(frozen=True)
class HankelReport:
    values: tuple
    first_zero: int | None

    @property
    def nondegenerate(self) -> bool:
        return self.first_zero is None


def hankel_matrix(g: MomentSequence, n: int) -> list[list]:
    vals = g.prefix(2 * n - 1) if n else []
    return [[vals[i + k] for k in range(n)] for i in range(n)]


def hankel_determinants(g: MomentSequence, N: int, tol: Tolerance | None = None) -> HankelReport:
    """``Delta_1 .. Delta_N`` of the normalized moments.

    Exact mode uses fraction-free elimination; float mode uses partial-pivot
    LU through numpy. A float determinant counts as zero when it is at most
    ``abs_eps`` times the Hadamard bound (product of row norms).
    """
    if N < 1:
        raise ValueError("N must be positive")
    H = hankel_matrix(g, N)
    if g.mode == EXACT:
        values = linalg.leading_minors_exact(H)
        first = next((k + 1 for k, v in enumerate(values) if v == 0), None)
        return HankelReport(tuple(values), first)
    tol = tol or DEFAULT_TOL
    A = np.array(H, dtype=complex)
    values, first = [], None
    for k in range(1, N + 1):
        sub = A[:k, :k]
        d = complex(np.linalg.det(sub))
        values.append(d)
        bound = float(np.prod(np.linalg.norm(sub, axis=1)))
        if first is None and abs(d) <= tol.abs_eps * bound:
            first = k
    return HankelReport(tuple(values), first)


def bilinear(g: MomentSequence, f, h) -> Scalar:
    """``<sigma, f h> = sum_ij f_i h_j g_{i+j}``."""
    f = as_polynomial(f, g.mode)
    h = as_polynomial(h, g.mode)
    if not f.coeffs or not h.coeffs:
        return zero(g.mode)
    vals = g.prefix(len(f) + len(h) - 1)
    total = zero(g.mode)
    for i, fi in enumerate(f.coeffs):
        if fi == 0:
            continue
        acc = zero(g.mode)
        for j, hj in enumerate(h.coeffs):
            acc += hj * vals[i + j]
        total += fi * acc
    return total


def apply_functional(g: MomentSequence, f) -> Scalar:
    f = as_polynomial(f, g.mode)
    vals = g.prefix(len(f))
    return sum((c * v for c, v in zip(f.coeffs, vals)), zero(g.mode))


def moments_from_recurrence(
    coeffs: Callable[[int], tuple],
    g0=1,
    N: int = 10,
    mode: str = EXACT,
    tol: Tolerance | None = None,
) -> MomentSequence:
    """Moments solving ``c_+(n) g_{n+1} + c_0(n) g_n + c_-(n) g_{n-1} = 0``.

    ``coeffs(n)`` returns ``(c_plus, c_zero, c_minus)``; ``g_{-1}`` is taken as
    zero. The first ``N + 1`` moments are computed eagerly so a breakdown
    (``c_+(n) == 0`` for ``n < N``) raises here; later moments extend lazily.
    """
    g0 = coerce(g0, mode)

    def rule(k, prefix):
        if k == 0:
            return g0
        n = k - 1
        cp, c0, cm = (coerce(c, mode) for c in coeffs(n))
        if is_zero(cp, tol):
            raise RecurrenceBreakdownError(f"leading coefficient c_+({n}) vanishes", index=n)
        prev = prefix[n - 1] if n >= 1 else zero(mode)
        return -(c0 * prefix[n] + cm * prev) / cp

    seq = MomentSequence(rule, mode)
    seq.prefix(N + 1)
    return seq


def moments_from_ops(Q: Sequence, mode: str | None = None) -> MomentSequence:
    """Moments of the functional annihilating ``Q_1, .., Q_N`` with ``g_0 = 1``.

    ``Q`` may start with ``Q_0`` (ignored). Each ``Q_n`` must be monic of degree
    ``n`` so the triangular system is solvable by back-substitution.
    """
    polys = [as_polynomial(q, mode) for q in Q]
    if polys and polys[0].degree == 0:
        polys = polys[1:]
    if mode is None:
        mode = polys[0].mode if polys else EXACT
    vals = [one(mode)]
    for n, q in enumerate(polys, start=1):
        if q.degree != n or abs(q.leading - 1) > 1e-9:
            raise ValueError(f"Q_{n} must be monic of degree {n}")
        vals.append(-sum((q[s] * vals[s] for s in range(n)), zero(mode)))
    return MomentSequence.from_values(vals, mode)


def load_moments(path: str, mode: str | None = None) -> MomentSequence:
    """Read a JSON array of scalars or a CSV file with one moment per line."""
    import json

    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("["):
        raw = json.loads(text)
        values = [from_json(v, mode) for v in raw]
    else:
        values = [coerce(line.split(",")[-1].strip(), mode or EXACT) for line in text.splitlines() if line.strip()]
    if not values:
        raise DegenerateFunctionalError("empty moment file", index=1)
    if mode is None:
        mode = FLOAT if any(isinstance(v, complex) for v in values) else EXACT
    return MomentSequence.from_values(values, mode)
