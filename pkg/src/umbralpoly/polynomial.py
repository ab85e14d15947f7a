"""Dense univariate polynomials over either scalar mode."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ModeMismatchError
from .scalars import EXACT, FLOAT, Scalar, coerce, mode_of, one, to_json, zero


def _infer_mode(values) -> str:
    modes = {mode_of(v) for v in values if not isinstance(v, int)}
    if len(modes) > 1:
        raise ModeMismatchError("polynomial coefficients mix exact and float values")
    return modes.pop() if modes else EXACT


@dataclass(frozen=True, init=False)
class Polynomial:
    """``coeffs[k]`` is the coefficient of ``x**k``; trailing zeros are stripped.

    Only exact zeros are stripped in float mode, so a float polynomial keeps
    its nominal degree even when the leading term is tiny.
    """

    coeffs: tuple
    mode: str

    def __init__(self, coeffs: Iterable = (), mode: str | None = None):
        values = list(coeffs)
        if mode is None:
            mode = _infer_mode(values)
        values = [coerce(v, mode) for v in values]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))
        object.__setattr__(self, "mode", mode)

    @classmethod
    def monomial(cls, n: int, mode: str = EXACT, c=1) -> "Polynomial":
        return cls([zero(mode)] * n + [coerce(c, mode)], mode)

    @classmethod
    def constant(cls, c, mode: str = EXACT) -> "Polynomial":
        return cls([c], mode)

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else zero(self.mode)

    def __getitem__(self, k: int) -> Scalar:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return zero(self.mode)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: "Polynomial"):
        if other.mode != self.mode:
            raise ModeMismatchError("polynomials of different modes")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.mode)
        self._check(other)
        n = max(len(self), len(other))
        return Polynomial([self[k] + other[k] for k in range(n)], self.mode)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.mode)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.mode)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = coerce(other, self.mode)
            return Polynomial([c * a for a in self.coeffs], self.mode)
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial([], self.mode)
        out = [zero(self.mode)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out, self.mode)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        return self * c

    def shift(self, k: int = 1) -> "Polynomial":
        """Multiply by ``x**k``."""
        if not self.coeffs:
            return self
        return Polynomial([zero(self.mode)] * k + list(self.coeffs), self.mode)

    def monic(self) -> "Polynomial":
        lead = self.leading
        return Polynomial([c / lead for c in self.coeffs], self.mode)

    def __call__(self, x):
        acc = zero(self.mode)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def padded(self, length: int) -> list:
        return list(self.coeffs) + [zero(self.mode)] * (length - len(self.coeffs))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def to_json(self) -> list:
        return [to_json(c) for c in self.coeffs]

    def __repr__(self):
        if not self.coeffs:
            return "Polynomial(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"({c})" + ("" if k == 0 else "*x" if k == 1 else f"*x^{k}"))
        return "Polynomial(" + " + ".join(terms) + ")"


def as_polynomial(p, mode: str | None = None) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    return Polynomial(p, mode)


def max_coeff_diff(p: Polynomial, q: Polynomial) -> float:
    n = max(len(p), len(q))
    return max((abs(p[k] - q[k]) for k in range(n)), default=0.0)


def x_poly(mode: str = EXACT) -> Polynomial:
    return Polynomial([zero(mode), one(mode)], mode)


def from_roots(roots: Sequence, mode: str = EXACT) -> Polynomial:
    p = Polynomial([one(mode)], mode)
    for r in roots:
        p = p * Polynomial([-coerce(r, mode), one(mode)], mode)
    return p


__all__ = ["Polynomial", "as_polynomial", "max_coeff_diff", "x_poly", "from_roots", "FLOAT", "EXACT"]
