from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from umbralpoly.errors import ModeMismatchError, ZeroDivisionFieldError
from umbralpoly.scalars import (
    EXACT,
    FLOAT,
    Tolerance,
    add,
    coerce,
    common_mode,
    div,
    from_json,
    is_zero,
    mode_of,
    mul,
    neg,
    power,
    scalar_eq,
    sub,
    to_json,
)

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)
nonzero = rationals.filter(lambda x: x != 0)
complexes = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@given(rationals, rationals, rationals)
def test_exact_field_axioms(a, b, c):
    assert add(a, b) == add(b, a)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert add(add(a, b), c) == add(a, add(b, c))
    assert sub(a, a) == 0
    assert add(a, neg(a)) == 0


@given(nonzero)
def test_exact_inverse(a):
    assert mul(a, div(1, a)) == 1


@given(complexes, complexes)
def test_float_commutes_within_tolerance(a, b):
    tol = Tolerance()
    assert scalar_eq(mul(a, b), mul(b, a), tol)
    assert scalar_eq(sub(add(a, b), b), a, Tolerance(1e-9, 1e-9))


@given(rationals)
def test_json_round_trip_exact(a):
    s = to_json(a)
    assert isinstance(s, str)
    assert from_json(s, EXACT) == a


@given(complexes)
def test_json_round_trip_float(z):
    assert from_json(to_json(z), FLOAT) == z


def test_mode_detection():
    assert mode_of(3) == EXACT
    assert mode_of(F(1, 3)) == EXACT
    assert mode_of(0.5) == FLOAT
    assert mode_of(1j) == FLOAT
    assert common_mode(1, F(1, 2)) == EXACT


def test_mixing_modes_is_rejected():
    with pytest.raises(ModeMismatchError):
        add(F(1, 2), 0.5)
    with pytest.raises(ModeMismatchError):
        coerce(0.5, EXACT)
    with pytest.raises(ModeMismatchError):
        coerce(F(1, 2), FLOAT)


def test_string_parsing():
    assert coerce("8/9", EXACT) == F(8, 9)
    assert coerce("0.25", FLOAT) == 0.25 + 0j
    assert coerce(" 1+2j ", FLOAT) == 1 + 2j


def test_division_by_zero():
    with pytest.raises(ZeroDivisionFieldError):
        div(F(1), F(0))
    with pytest.raises(ZeroDivisionFieldError):
        div(1.0 + 0j, 1e-30 + 0j)


def test_power_and_zero_tests():
    assert power(F(1, 2), 3) == F(1, 8)
    assert power(F(2), -2) == F(1, 4)
    assert is_zero(F(0))
    assert not is_zero(F(1, 10**30))
    assert is_zero(1e-14 + 0j)
    assert not is_zero(1e-14 + 0j, Tolerance(1e-16, 1e-16))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)
    assert Tolerance(0, 1e-3).close(1000.0, 1000.5)
