"""Concrete umbral-classical families.

Parameters follow the symbols of the underlying moment equations directly:

* classical, ``mu_n = n``::

      (xi_m1 n + eta_m1) g_{n+1} + (xi_0 n + eta_0) g_n + xi_1 n g_{n-1} = 0

* q-classical, ``mu_n = (1 - q^n) / (1 - q)``::

      (xi_m1 + eta_m1 q^n) g_{n+1} + (xi_0 + eta_0 q^n) g_n + xi_1 (1 - q^n) g_{n-1} = 0

* Krall-Jacobi, ``mu_n = n / (n + alpha)`` and
  ``g_n = (alpha / beta) (n + beta) / (n + alpha)``;
* Dunkl, ``mu_n = n + eta (1 - (-1)^n)`` (derivative only, no moments).

Hermite, Laguerre, Jacobi and Bessel moments are parameter choices of
:func:`classical_instance`; e.g. ``xi = (0, 0, 1), eta = (-2, 0)`` gives the
Hermite moments ``g_{2k} = (2k - 1)!! / 2^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidParameterError, RecurrenceBreakdownError
from .moments import MomentSequence, moments_from_recurrence
from .scalars import EXACT, FLOAT, Scalar, coerce, mode_of, to_json
from .umbral import UmbralDerivative, build_local_D


def _mode(*values) -> str:
    return FLOAT if any(mode_of(v) == FLOAT for v in values if not isinstance(v, (int, str))) else EXACT


@dataclass(frozen=True)
class ClassicalParams:
    xi: tuple  # (xi_m1, xi_0, xi_1)
    eta: tuple  # (eta_m1, eta_0)

    def __post_init__(self):
        if len(self.xi) != 3 or len(self.eta) != 2:
            raise InvalidParameterError("classical family needs xi = (xi_m1, xi_0, xi_1) and eta = (eta_m1, eta_0)")


@dataclass(frozen=True)
class QClassicalParams:
    q: Scalar
    xi: tuple  # (xi_m1, xi_0, xi_1)
    eta: tuple  # (eta_m1, eta_0); eta_1 = -xi_1 is implied

    def __post_init__(self):
        if len(self.xi) != 3 or len(self.eta) != 2:
            raise InvalidParameterError("q-classical family needs xi = (xi_m1, xi_0, xi_1) and eta = (eta_m1, eta_0)")


@dataclass(frozen=True)
class KrallParams:
    alpha: Scalar
    beta: Scalar


@dataclass(frozen=True)
class DunklParams:
    eta: Scalar


@dataclass
class Instance:
    """Moments and derivative of one family member, plus the known
    derived functional when the family provides it."""

    name: str
    g: MomentSequence
    D: UmbralDerivative
    params: object
    tau: MomentSequence | None = None
    meta: dict = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return self.g.mode

    def params_json(self) -> dict:
        p = self.params
        out = {}
        for k, v in vars(p).items():
            out[k] = [to_json(coerce(x, self.mode)) for x in v] if isinstance(v, tuple) else to_json(coerce(v, self.mode))
        return out


def classical_mu(mode: str = EXACT) -> UmbralDerivative:
    return UmbralDerivative(lambda n: n, mode, label="d/dx")


def q_mu(q, mode: str | None = None) -> UmbralDerivative:
    mode = mode or _mode(q)
    q = coerce(q, mode)
    return UmbralDerivative(lambda n: (1 - q**n) / (1 - q), mode, label=f"D_q(q={q})")


def classical_instance(p: ClassicalParams, N: int = 10, mode: str | None = None) -> Instance:
    mode = mode or _mode(*p.xi, *p.eta)
    xm1, x0, x1 = (coerce(v, mode) for v in p.xi)
    em1, e0 = (coerce(v, mode) for v in p.eta)
    g = moments_from_recurrence(lambda n: (xm1 * n + em1, x0 * n + e0, x1 * n), 1, 2 * N + 2, mode)
    return Instance("classical", g, classical_mu(mode), p)


def q_classical_instance(p: QClassicalParams, N: int = 10, mode: str | None = None) -> Instance:
    mode = mode or _mode(p.q, *p.xi, *p.eta)
    q = coerce(p.q, mode)
    if q == 0 or q == 1:
        raise InvalidParameterError("q must differ from 0 and 1")
    for n in range(1, N + 1):
        if q**n == 1:
            raise InvalidParameterError(f"q is a root of unity: q^{n} = 1")
    xm1, x0, x1 = (coerce(v, mode) for v in p.xi)
    em1, e0 = (coerce(v, mode) for v in p.eta)
    g = moments_from_recurrence(
        lambda n: (xm1 + em1 * q**n, x0 + e0 * q**n, x1 * (1 - q**n)), 1, 2 * N + 2, mode
    )
    return Instance("qclassical", g, q_mu(q, mode), p)


def _check_krall(alpha, beta, mode):
    if alpha == beta:
        raise InvalidParameterError("Krall family needs beta != alpha")
    if beta == 0:
        raise InvalidParameterError("Krall family needs beta != 0")
    if mode == EXACT and alpha.denominator == 1 and alpha <= 0:
        raise InvalidParameterError(f"alpha = {alpha} is a non-positive integer: pole in g_n and mu_n")
    if mode == FLOAT and abs(alpha.imag) < 1e-14 and abs(alpha.real - round(alpha.real)) < 1e-14 and alpha.real <= 0:
        raise InvalidParameterError(f"alpha = {alpha} is a non-positive integer: pole in g_n and mu_n")


def krall_moment(alpha, beta, n):
    return alpha / beta * (n + beta) / (n + alpha)


def krall_instance(p: KrallParams, N: int = 10, mode: str | None = None) -> Instance:
    """Rational limit of the elliptic family.

    ``tau`` carries ``g~_n = (g_{n+2} - g_1 g_{n+1}) / (mu_1 mu_{n+1})`` with its raw
    scale, which makes ``R`` fully degenerate (``lambda_n = 1``, ``n >= 1``).
    """
    mode = mode or _mode(p.alpha, p.beta)
    a, b = coerce(p.alpha, mode), coerce(p.beta, mode)
    _check_krall(a, b, mode)
    g = MomentSequence.from_function(lambda n: krall_moment(a, b, n), mode)
    D = UmbralDerivative(lambda n: n / (n + a), mode, label=f"krall(alpha={a})")
    mu1 = D.mu(1)
    g1 = g[1]
    tau = MomentSequence.from_function(lambda n: (g[n + 2] - g1 * g[n + 1]) / (mu1 * D.mu(n + 1)), mode)
    return Instance("krall", g, D, p, tau=tau)


def krall_weight_moment(p: KrallParams, n: int):
    """``(alpha (beta - alpha) / beta) * int_0^1 x^n (x^(alpha-1) + delta(x-1)/(beta-alpha)) dx``.

    The absolutely continuous part integrates to ``1 / (n + alpha)`` and the
    point mass at 1 contributes ``1 / (beta - alpha)``.
    """
    mode = _mode(p.alpha, p.beta)
    a, b = coerce(p.alpha, mode), coerce(p.beta, mode)
    return a * (b - a) / b * (1 / (n + a) + 1 / (b - a))


def dunkl_mu(p: DunklParams, mode: str | None = None) -> UmbralDerivative:
    """``mu_n = n + eta (1 - (-1)^n)``, i.e. ``D = d/dx + eta x^{-1} (1 - reflection)``.

    Built as a local derivative with root 1 (weight ``eta + n``) and root -1
    (weight ``-eta``).
    """
    mode = mode or _mode(p.eta)
    eta = coerce(p.eta, mode)
    two_eta = 2 * eta
    if mode == EXACT:
        bad = two_eta.denominator == 1 and two_eta < 0 and two_eta.numerator % 2 == 1
    else:
        r = round(two_eta.real)
        bad = abs(two_eta - r) < 1e-14 and r < 0 and r % 2 == 1
    if bad:
        raise RecurrenceBreakdownError(f"mu_{int(-two_eta.real)} = 0 for eta = {eta}", index=int(-two_eta.real))
    return build_local_D([1, -1], [(eta, 1), (-eta,)], mode, label=f"dunkl(eta={eta})")
