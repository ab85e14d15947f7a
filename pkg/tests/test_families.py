from fractions import Fraction as F
from math import factorial

import pytest

from umbralpoly.errors import InvalidParameterError, RecurrenceBreakdownError
from umbralpoly.families import (
    ClassicalParams,
    DunklParams,
    KrallParams,
    QClassicalParams,
    classical_instance,
    dunkl_mu,
    krall_instance,
    krall_moment,
    krall_weight_moment,
    q_classical_instance,
    q_mu,
)
from umbralpoly.scalars import FLOAT


def test_hahn_legendre_moments():
    inst = classical_instance(ClassicalParams((1, -1, 0), (2, -1)), N=12)
    assert [inst.g[n] for n in range(25)] == [F(1, n + 1) for n in range(25)]


def test_hermite_moments():
    inst = classical_instance(ClassicalParams((0, 0, 1), (-2, 0)), N=6)
    for k in range(6):
        double_fact = factorial(2 * k) // (2**k * factorial(k))
        assert inst.g[2 * k] == F(double_fact, 2**k)
        assert inst.g[2 * k + 1] == 0


def test_laguerre_moments():
    # g_n = (a)_n, the moments of x^(a-1) e^(-x) normalized
    a = F(3, 2)
    inst = classical_instance(ClassicalParams((0, 1, 0), (-1, a)), N=5)
    expect = F(1)
    for n in range(10):
        assert inst.g[n] == expect
        expect *= n + a


def test_classical_breakdown():
    with pytest.raises(RecurrenceBreakdownError):
        classical_instance(ClassicalParams((1, 0, 0), (-3, 1)), N=5)


def test_q_legendre_moments():
    q = F(1, 2)
    inst = q_classical_instance(QClassicalParams(q, (1, -1, 0), (-q * q, q)), N=8)
    assert all(inst.g[n] == (1 - q) / (1 - q ** (n + 1)) for n in range(17))
    assert [inst.D.mu(n) for n in range(4)] == [0, 1, F(3, 2), F(7, 4)]


def test_q_validation():
    for q in (0, 1, -1):
        with pytest.raises(InvalidParameterError):
            q_classical_instance(QClassicalParams(q, (1, -1, 0), (0, 1)), N=4)


def test_q_mu_float():
    D = q_mu(0.5 + 0j)
    assert abs(D.mu(3) - 1.75) < 1e-15 and D.mode == FLOAT


def test_krall_moments_match_weight():
    p = KrallParams(2, 3)
    inst = krall_instance(p)
    assert inst.g[1] == F(8, 9)
    assert all(inst.g[n] == krall_moment(F(2), F(3), n) == krall_weight_moment(p, n) for n in range(12))
    # g~_n = (g_{n+2} - g_1 g_{n+1}) / (mu_1 mu_{n+1})
    assert inst.tau.raw(0) == (inst.g[2] - inst.g[1] ** 2) / (inst.D.mu(1) ** 2)


def test_krall_validation():
    for a, b in ((2, 2), (2, 0), (0, 3), (-2, 3)):
        with pytest.raises(InvalidParameterError):
            krall_instance(KrallParams(a, b))


def test_dunkl_mu():
    D = dunkl_mu(DunklParams(F(1, 2)))
    assert [D.mu(n) for n in range(6)] == [0, 2, 2, 4, 4, 6]
    with pytest.raises(RecurrenceBreakdownError):
        dunkl_mu(DunklParams(F(-3, 2)))
    assert dunkl_mu(DunklParams(F(-1))).mu(1) == -1


def test_params_json():
    inst = krall_instance(KrallParams(2, 3))
    assert inst.params_json() == {"alpha": "2", "beta": "3"}


def test_q_moments_first_terms():
    inst = q_classical_instance(QClassicalParams(F(1, 2), (1, -1, 0), (0, F(1, 2))), N=4)
    assert inst.g[1] == F(1, 2) and inst.g[2] == F(3, 8)
