import cmath
import random
from fractions import Fraction as F

import pytest

from umbralpoly.elliptic import (
    EllipticParams,
    SigmaEvaluator,
    check_degenerate_identities,
    degenerate_residuals,
    elliptic_3E2,
    elliptic_instance,
    elliptic_mu,
    elliptic_mu_g,
    elliptic_P,
    elliptic_pochhammer,
    elliptic_recurrence,
    shift_property_check,
    sigma_reference,
    sigma_reference_with_tail,
    sigma_taylor_coefficients,
    three_way_check,
)
from umbralpoly.errors import InvalidParameterError, LatticeCollisionError, SigmaDomainError
from umbralpoly.families import KrallParams, krall_instance
from umbralpoly.orthopoly import monic_ops_from_moments
from umbralpoly.polynomial import Polynomial
from umbralpoly.scalars import EXACT, FLOAT
from umbralpoly.umbral import is_umbral_classical

GENERIC = EllipticParams.build(4, 1, 0.1, 0.3, 0.7)
RATIONAL = EllipticParams.build(0, 0, 1, 2, 3)


def test_sigma_low_order_coefficients():
    g2, g3 = 4.0, 1.0
    c = sigma_taylor_coefficients(g2, g3, 5)
    assert c[0] == 1 and c[1] == 0
    assert abs(c[2] + g2 / 240) < 1e-17
    assert abs(c[3] + g3 / 840) < 1e-17
    assert abs(c[4] + g2**2 / 161280) < 1e-18


def test_sigma_small_argument():
    s = SigmaEvaluator(4, 1)
    # z - g2 z^5 / 240 - g3 z^7 / 840 + O(z^9)
    assert abs(s(0.1) - (0.1 - 4e-5 / 240 - 1e-7 / 840)) < 2e-13
    assert abs(s(0.1) - 0.0999998332141865) < 1e-15


def test_sigma_is_odd_and_homogeneous():
    s = SigmaEvaluator(4, 1)
    s2 = SigmaEvaluator(4 * 16, 64)  # lattice scaled by 1/2: sigma(z/2; ...) = sigma(z) / 2
    for z in (0.3, 1.1 + 0.4j, -2.0j):
        assert abs(s(-z) + s(z)) < 1e-15
        assert abs(s2(z / 2) - s(z) / 2) < 1e-13


def test_sigma_oracle_agreement():
    s = SigmaEvaluator(4, 1)
    rng = random.Random(7)
    for _ in range(40):
        z = rng.uniform(0, 1.2) * cmath.exp(1j * rng.uniform(0, 2 * cmath.pi))
        ref, tail = sigma_reference_with_tail(z, 4, 1)
        assert abs(s(z) - ref) < 1e-14
        assert tail < 1e-20


def test_sigma_oracle_at_medium_radius():
    s = SigmaEvaluator(4, 1)
    assert abs(s(2.0) - sigma_reference(2.0, 4, 1, terms=200)) < 1e-12


def test_sigma_domain():
    s = SigmaEvaluator(4, 1, max_radius=3.0)
    with pytest.raises(SigmaDomainError):
        s(3.5)
    assert s.error_bound(3.0) < 1e-12


def test_rational_limit_sigma_is_identity():
    s = SigmaEvaluator(0, 0)
    assert s.coeffs[0] == 1 and not any(s.coeffs[1:])
    assert s(2.5) == 2.5


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        EllipticParams.build(4, 1, 0.1, 0.3, 0.3)
    with pytest.raises(InvalidParameterError):
        EllipticParams(4, 1, 1, 2, 3, EXACT)
    with pytest.raises(InvalidParameterError):
        EllipticParams.build(3, 1, 0.1, 0.3, 0.7)  # 27 - 27 = 0: singular
    assert GENERIC.mode == FLOAT and RATIONAL.mode == EXACT


def test_lattice_collision_exact():
    p = EllipticParams.build(0, 0, 1, -1, 3)
    with pytest.raises(LatticeCollisionError):
        elliptic_mu(p, 1)


def test_lattice_collision_float():
    s = SigmaEvaluator(4, 1)
    lo, hi = 4.4, 5.1
    assert s(lo).real * s(hi).real < 0
    for _ in range(60):
        mid = (lo + hi) / 2
        if s(lo).real * s(mid).real <= 0:
            hi = mid
        else:
            lo = mid
    w = 0.1
    p = EllipticParams.build(4, 1, w, lo / w - 1, 0.7)
    with pytest.raises(LatticeCollisionError):
        elliptic_mu(p, 1)


def test_rational_limit_is_krall():
    inst = elliptic_instance(RATIONAL)
    kr = krall_instance(KrallParams(2, 3))
    assert all(inst.g[n] == kr.g[n] for n in range(10))
    assert all(inst.D.mu(n) == kr.D.mu(n) for n in range(10))
    assert all(inst.tau.raw(n) == kr.tau.raw(n) for n in range(10))
    data = elliptic_mu_g(RATIONAL, 4)
    assert data.g[1] == F(8, 9) and len(data.g) == 9 and len(data.g_tilde) == 7
    assert data.g_tilde_normalized[0] == 1


def test_rational_limit_recurrence():
    rec = elliptic_recurrence(RATIONAL, 12)
    P = monic_ops_from_moments(elliptic_instance(RATIONAL).g, 13)
    assert rec.A[0] == F(8, 9) and rec.C[0] == 0
    assert all(P.b[n] == rec.b[n] for n in range(13))
    assert all(P.u[n] == rec.u[n] for n in range(1, 13))


def test_rational_limit_checks_are_exact():
    ident = check_degenerate_identities(RATIONAL, 8)
    assert ident.passed and all(v == 0 for v in ident.residuals.values())
    assert three_way_check(RATIONAL, 10).passed
    assert shift_property_check(RATIONAL, 8).passed


def test_w_scaling_in_rational_limit():
    # y(x) = w x: every ratio is w-independent
    p = EllipticParams.build(0, 0, F(3, 7), 2, 3)
    assert elliptic_P(4, p) == elliptic_P(4, RATIONAL)


def test_pochhammer_and_3E2():
    assert elliptic_pochhammer(2, 3, RATIONAL) == 24
    assert elliptic_pochhammer(F(1, 2), 0, RATIONAL) == 1
    assert elliptic_pochhammer(1, 4, lambda x: x) == 24
    # -n in the numerator terminates the series at degree n
    E = elliptic_3E2(3, 5, 7, 2, 4, RATIONAL)
    assert E.degree == 3 and E[0] == 1
    assert E[1] == F(-3 * 5 * 7, 1 * 2 * 4)


def test_generic_identities():
    rep = check_degenerate_identities(GENERIC, 8, 1e-10)
    assert rep.passed
    assert rep.residuals["ratio"] < 1e-12


def test_degenerate_residuals_detect_perturbation():
    data = elliptic_mu_g(GENERIC, 10)
    g = list(data.g)
    g[5] += 1e-6
    res = degenerate_residuals(data.mu, g, data.g_tilde, 4)
    assert res["moment"] > 1e-8


def test_generic_three_way_and_shift():
    assert three_way_check(GENERIC, 6, 1e-8).passed
    shift = shift_property_check(GENERIC, 5, 1e-8)
    assert shift.passed and shift.per_degree[0] == 0


def test_generic_raising_operator_is_fully_degenerate():
    inst = elliptic_instance(GENERIC)
    rep = is_umbral_classical(inst.g, inst.D, 6, tau=inst.tau)
    assert rep.band_width == "nonlocal"
    lam = rep.eigen.data.lambda_
    # float Hankel norms at n = 6 carry ~1e-8 relative error
    assert all(abs(lam[n] - 1) < 1e-7 for n in range(1, 7))
    for n in range(6):
        mu = inst.D.mu(n + 1)
        assert abs(rep.R.columns[n][0] + inst.g[n + 1] / mu) < 1e-7
        assert abs(rep.R.columns[n][n + 1] - 1 / mu) < 1e-7


def test_elliptic_P_matches_hankel_degree_two():
    P = monic_ops_from_moments(elliptic_instance(GENERIC).g, 2)
    E = elliptic_P(2, GENERIC)
    assert isinstance(E, Polynomial)
    assert max(abs(a - b) for a, b in zip(E.coeffs, P[2].coeffs)) < 1e-10
