"""Field elements in two modes: exact rationals and complex floats.

Exact values are :class:`fractions.Fraction` (ints are accepted and promoted),
float values are :class:`complex`. The two modes never mix; every binary
operation checks that both operands live in the same mode.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ModeMismatchError, ZeroDivisionFieldError

EXACT = "exact"
FLOAT = "float"

Scalar = Union[Fraction, complex]


@dataclass(frozen=True)
class Tolerance:
    """Float-mode equality: ``|a - b| <= abs_eps + rel_eps * max(|a|, |b|)``."""

    abs_eps: float = 1e-12
    rel_eps: float = 1e-10

    def __post_init__(self):
        if not (self.abs_eps >= 0 and self.rel_eps >= 0):
            raise ValueError("tolerances must be non-negative")

    def close(self, a: complex, b: complex) -> bool:
        return abs(a - b) <= self.abs_eps + self.rel_eps * max(abs(a), abs(b))


DEFAULT_TOL = Tolerance()


def mode_of(x) -> str:
    """Mode of a single value. Plain ints are exact."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return EXACT
    if isinstance(x, (complex, float)):
        return FLOAT
    raise TypeError(f"not a field element: {x!r}")


def common_mode(*xs) -> str:
    modes = {mode_of(x) for x in xs if not isinstance(x, int)}
    if len(modes) > 1:
        raise ModeMismatchError(f"mixed exact and float operands: {xs!r}")
    return modes.pop() if modes else EXACT


def coerce(x, mode: str) -> Scalar:
    """Convert ``x`` into ``mode``.

    Strings are parsed (``"p/q"`` for exact; anything :func:`complex` accepts
    for float). An exact value handed to float mode, or a float handed to
    exact mode, is a mode mismatch; only ints and strings cross freely.
    """
    if isinstance(x, str):
        return Fraction(x.strip()) if mode == EXACT else complex(x.strip().replace(" ", ""))
    if isinstance(x, bool):
        raise TypeError("bool is not a field element")
    if mode == EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise ModeMismatchError(f"float value {x!r} used in exact mode")
    if mode == FLOAT:
        if isinstance(x, complex):
            return x
        if isinstance(x, (int, float)):
            return complex(x)
        if isinstance(x, numbers.Complex) and not isinstance(x, Fraction):
            return complex(x)
        raise ModeMismatchError(f"exact value {x!r} used in float mode")
    raise ValueError(f"unknown mode {mode!r}")


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0j


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == EXACT else 1 + 0j


def is_zero(x: Scalar, tol: Tolerance | None = None, scale: float = 1.0) -> bool:
    """Exact zero test, or ``|x| <= abs_eps * scale`` in float mode."""
    if mode_of(x) == EXACT:
        return x == 0
    tol = tol or DEFAULT_TOL
    return abs(x) <= tol.abs_eps * scale


def scalar_eq(a: Scalar, b: Scalar, tol: Tolerance | None = None) -> bool:
    if common_mode(a, b) == EXACT:
        return Fraction(a) == Fraction(b)
    return (tol or DEFAULT_TOL).close(complex(a), complex(b))


def add(a, b):
    common_mode(a, b)
    return a + b


def sub(a, b):
    common_mode(a, b)
    return a - b


def mul(a, b):
    common_mode(a, b)
    return a * b


def neg(a):
    mode_of(a)
    return -a


def div(a, b, tol: Tolerance | None = None):
    mode = common_mode(a, b)
    if mode == EXACT:
        if b == 0:
            raise ZeroDivisionFieldError("division by exact zero")
        return Fraction(a) / Fraction(b)
    tol = tol or DEFAULT_TOL
    if abs(b) <= tol.abs_eps:
        raise ZeroDivisionFieldError(f"division by |b| = {abs(b):.3g} <= abs_eps")
    return complex(a) / complex(b)


def power(a, k: int):
    if not isinstance(k, int):
        raise TypeError("integer exponent required")
    if mode_of(a) == EXACT:
        a = Fraction(a)
        if k < 0 and a == 0:
            raise ZeroDivisionFieldError("zero to a negative power")
        return a**k
    return complex(a) ** k


def to_json(x: Scalar):
    """``"p/q"`` for exact values, ``[re, im]`` for floats."""
    if mode_of(x) == EXACT:
        return str(Fraction(x))
    x = complex(x)
    return [x.real, x.imag]


def from_json(obj, mode: str | None = None) -> Scalar:
    if isinstance(obj, list):
        if len(obj) != 2:
            raise ValueError(f"complex value must be [re, im], got {obj!r}")
        value = complex(float(obj[0]), float(obj[1]))
        return coerce(value, mode) if mode else value
    if isinstance(obj, str):
        return coerce(obj, mode or EXACT)
    if isinstance(obj, int) and not isinstance(obj, bool):
        return coerce(obj, mode or EXACT)
    if isinstance(obj, float):
        return coerce(obj, mode or FLOAT)
    raise ValueError(f"cannot decode scalar from {obj!r}")
