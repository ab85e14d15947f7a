"""Weierstrass sigma, elliptic Pochhammer symbols and the fully degenerate family.

The family has ``mu_n = s(n) / s(n + alpha)`` and
``g_n = [s(alpha) / s(beta)] s(n + beta) / s(n + alpha)`` with ``s(x) = sigma(w x)``.
Its raising operator is ``R x^n = (x^(n+1) - g_{n+1}) / mu_{n+1}``, so both
eigenvalue problems collapse to ``lambda_n = 1`` for ``n >= 1``.

When ``g2 = g3 = 0`` sigma is the identity and, with exact parameters, every
routine here runs in exact rational arithmetic (the Krall-Jacobi case).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import InvalidParameterError, LatticeCollisionError, SigmaDomainError
from .families import Instance
from .moments import MomentSequence
from .orthopoly import MonicPolySystem, monic_ops_from_moments, ops_from_recurrence
from .polynomial import Polynomial, max_coeff_diff
from .scalars import EXACT, FLOAT, Scalar, coerce, mode_of, one, to_json, zero
from .umbral import UmbralDerivative, derived_polys

_EPS = 2.0**-52


@lru_cache(maxsize=None)
def _weierstrass_a(m: int, n: int) -> Fraction:
    """Coefficients of ``sigma(z) = sum a_{m,n} (g2/2)^m (2 g3)^n z^(4m+6n+1) / (4m+6n+1)!``."""
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0 and n == 0:
        return Fraction(1)
    return (
        3 * (m + 1) * _weierstrass_a(m + 1, n - 1)
        + Fraction(16, 3) * (n + 1) * _weierstrass_a(m - 2, n + 1)
        - Fraction(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * _weierstrass_a(m - 1, n)
    )


def sigma_taylor_coefficients(g2, g3, count: int, dps: int = 40) -> list[complex]:
    """``c_k`` with ``sigma(z) = sum_k c_k z^(2k+1)``, accumulated in mpmath."""
    out = []
    with mpmath.workdps(dps):
        h2 = mpmath.mpc(complex(g2)) / 2
        h3 = 2 * mpmath.mpc(complex(g3))
        for k in range(count):
            total = mpmath.mpc(0)
            # 4m + 6n = 2k
            for n in range(k // 3 + 1):
                rest = 2 * k - 6 * n
                if rest % 4:
                    continue
                m = rest // 4
                a = _weierstrass_a(m, n)
                if a:
                    total += mpmath.mpf(a.numerator) / a.denominator * h2**m * h3**n
            out.append(complex(total / mpmath.factorial(2 * k + 1)))
    return out


def sigma_reference(z, g2, g3, terms: int = 60, dps: int = 50) -> complex:
    """Independent evaluation through the Laurent coefficients of ``wp``.

    With ``wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)``, ``c_2 = g2/20``,
    ``c_3 = g3/28`` and
    ``c_k = 3 / ((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}``, integrating
    ``zeta' = -wp`` and ``sigma'/sigma = zeta`` gives
    ``sigma(z) = z exp(-sum_k c_k z^(2k) / ((2k-1) 2k))``. The exponent series
    converges only inside the nearest nonzero lattice point, so this is meant
    for small ``|z|``; the last included term is returned in the error
    estimate of :func:`sigma_reference_with_tail`.
    """
    return sigma_reference_with_tail(z, g2, g3, terms, dps)[0]


def sigma_reference_with_tail(z, g2, g3, terms: int = 60, dps: int = 50) -> tuple[complex, float]:
    with mpmath.workdps(dps):
        c = {2: mpmath.mpc(complex(g2)) / 20, 3: mpmath.mpc(complex(g3)) / 28}
        for k in range(4, terms + 2):
            c[k] = 3 * mpmath.fsum(c[m] * c[k - m] for m in range(2, k - 1)) / ((2 * k + 1) * (k - 3))
        z = mpmath.mpc(complex(z))
        z2 = z * z
        expo = mpmath.mpc(0)
        last = mpmath.mpf(0)
        for k in range(2, terms + 2):
            term = c[k] * z2**k / ((2 * k - 1) * 2 * k)
            expo += term
            last = abs(term)
        value = z * mpmath.exp(-expo)
        return complex(value), float(last * abs(value))


class SigmaEvaluator:
    """``sigma(z; g2, g3)`` by its Taylor series, valid for ``|z| <= max_radius``.

    The series is entire, so the truncation only has to be long enough for
    the chosen radius: terms are added until ``|c_k| R^(2k+1)`` falls below
    ``1e-18 * max(1, peak term)`` and has been shrinking by at least half per
    step over the last four terms. The neglected tail is then below the
    double-precision rounding of the peak term. :meth:`error_bound` returns
    that rounding-plus-tail estimate for a given argument; for ``g2 = 4, g3 = 1``
    it is about ``1e-10`` at ``|z| = 5.2`` (where ``sigma ~ 4e2``) and grows to
    ``2e-6`` at ``|z| = 8``. Beyond ``max_radius`` evaluation
    raises :class:`SigmaDomainError`.
    """

    def __init__(self, g2=0, g3=0, max_radius: float = 8.0, max_terms: int = 400):
        self.g2 = complex(g2)
        self.g3 = complex(g3)
        self.max_radius = float(max_radius)
        R = self.max_radius
        coeffs: list[complex] = []
        chunk = 40
        while True:
            coeffs = sigma_taylor_coefficients(self.g2, self.g3, len(coeffs) + chunk)
            terms = [abs(c) * R ** (2 * k + 1) for k, c in enumerate(coeffs)]
            peak = max(terms)
            cut = self._cutoff(terms, peak)
            if cut is not None:
                break
            if len(coeffs) >= max_terms:
                raise SigmaDomainError(f"sigma series did not settle within {max_terms} terms at radius {R}")
        self.coeffs = coeffs[:cut]
        self.peak = peak
        self.tail_bound = 2 * terms[cut]

    @staticmethod
    def _cutoff(terms, peak):
        target = 1e-18 * max(1.0, peak)
        for k in range(4, len(terms)):
            window = terms[k - 4 : k + 1]
            shrinking = all(b <= 0.5 * a or b == 0 for a, b in zip(window, window[1:]))
            if terms[k] <= target and shrinking:
                return k
        return None

    @property
    def is_rational(self) -> bool:
        return self.g2 == 0 and self.g3 == 0

    def __call__(self, z) -> complex:
        z = complex(z)
        if abs(z) > self.max_radius * (1 + 1e-12):
            raise SigmaDomainError(f"|z| = {abs(z):.4g} exceeds the validated radius {self.max_radius}")
        z2 = z * z
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z2 + c
        return acc * z

    def error_bound(self, z) -> float:
        z = complex(z)
        absolute = sum(abs(c) * abs(z) ** (2 * k + 1) for k, c in enumerate(self.coeffs))
        return 4 * len(self.coeffs) * _EPS * absolute + self.tail_bound


def sigma(z, p: SigmaEvaluator) -> complex:
    return p(z)


@dataclass(frozen=True)
class EllipticParams:
    """Invariants ``g2, g3``, step ``w`` and family parameters ``alpha != beta``.

    Exact mode is only available in the rational limit ``g2 = g3 = 0``; there
    ``y(x) = w x``. Otherwise everything is complex floating point and
    ``y(x) = sigma(w x)``.
    """

    g2: Scalar
    g3: Scalar
    w: Scalar
    alpha: Scalar
    beta: Scalar
    mode: str = FLOAT
    max_radius: float = 8.0
    _sigma: SigmaEvaluator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        vals = {}
        for name in ("g2", "g3", "w", "alpha", "beta"):
            vals[name] = coerce(getattr(self, name), self.mode)
            object.__setattr__(self, name, vals[name])
        if self.mode == EXACT and (self.g2 != 0 or self.g3 != 0):
            raise InvalidParameterError("exact mode requires the rational limit g2 = g3 = 0")
        if self.alpha == self.beta:
            raise InvalidParameterError("beta must differ from alpha")
        if self.w == 0 or self.alpha == 0 or self.beta == 0:
            raise InvalidParameterError("w, alpha and beta must be nonzero")
        if self.mode == FLOAT:
            disc = self.g2**3 - 27 * self.g3**2
            if abs(disc) == 0 and not (self.g2 == 0 and self.g3 == 0):
                raise InvalidParameterError("singular curve: g2^3 - 27 g3^2 = 0")
            object.__setattr__(self, "_sigma", SigmaEvaluator(self.g2, self.g3, self.max_radius))

    @classmethod
    def build(cls, g2, g3, w, alpha, beta, mode: str | None = None, **kw) -> "EllipticParams":
        """Pick exact mode automatically for exact rational-limit input."""
        if mode is None:
            vals = [g2, g3, w, alpha, beta]
            exact_input = all(isinstance(v, (int, Fraction)) or (isinstance(v, str) and "j" not in v and "." not in v and "e" not in v.lower()) for v in vals)
            rational = all(coerce(v, EXACT if exact_input else FLOAT) == 0 for v in (g2, g3))
            mode = EXACT if exact_input and rational else FLOAT
        return cls(g2, g3, w, alpha, beta, mode, **kw)

    @property
    def is_rational_limit(self) -> bool:
        return self.g2 == 0 and self.g3 == 0

    @property
    def discriminant(self):
        return self.g2**3 - 27 * self.g3**2

    def y(self, x) -> Scalar:
        x = coerce(x, self.mode) if not isinstance(x, int) else x
        if self.mode == EXACT:
            return self.w * x
        return self._sigma(self.w * x)

    def y_nonzero(self, x, what: str = "") -> Scalar:
        v = self.y(x)
        if self.mode == EXACT:
            if v == 0:
                raise LatticeCollisionError(f"y({x}) = 0 {what}".strip())
        else:
            if abs(v) <= 1e3 * self._sigma.error_bound(self.w * complex(x)):
                raise LatticeCollisionError(f"sigma(w*({x})) is numerically zero {what}".strip())
        return v

    def shifted(self) -> "EllipticParams":
        """Parameters of the derived family: ``alpha + 2``, ``beta + alpha + 2``."""
        return EllipticParams(self.g2, self.g3, self.w, self.alpha + 2, self.beta + self.alpha + 2, self.mode, self.max_radius)

    def to_json(self) -> dict:
        return {k: to_json(getattr(self, k)) for k in ("g2", "g3", "w", "alpha", "beta")}


def elliptic_mu(p: EllipticParams, n: int) -> Scalar:
    if n == 0:
        return zero(p.mode)
    return p.y(n) / p.y_nonzero(n + p.alpha, "in mu_n")


def elliptic_g(p: EllipticParams, n: int) -> Scalar:
    return p.y(p.alpha) / p.y_nonzero(p.beta) * p.y(n + p.beta) / p.y_nonzero(n + p.alpha, "in g_n")


def elliptic_g_tilde(p: EllipticParams, n: int) -> Scalar:
    """Derived moments in their natural (unnormalized) scale."""
    a, b = p.alpha, p.beta
    return (
        p.y(a) * p.y(b - a) * p.y(n + a + b + 2)
        / (p.y_nonzero(b) ** 2 * p.y_nonzero(n + a + 2, "in g~_n"))
    )


def elliptic_instance(p: EllipticParams) -> Instance:
    D = UmbralDerivative(lambda n: elliptic_mu(p, n), p.mode, label="elliptic")
    g = MomentSequence.from_function(lambda n: elliptic_g(p, n), p.mode)
    tau = MomentSequence.from_function(lambda n: elliptic_g_tilde(p, n), p.mode)
    return Instance("elliptic", g, D, p, tau=tau)


@dataclass
class EllipticMoments:
    mu: list
    g: list
    g_tilde: list
    g_tilde_normalized: list


def elliptic_mu_g(p: EllipticParams, N: int) -> EllipticMoments:
    """``mu_0..mu_N``, ``g_0..g_{2N}`` and ``g~_0..g~_{2N-2}`` (raw and with ``g~_0 = 1``)."""
    mu = [elliptic_mu(p, n) for n in range(N + 1)]
    g = [elliptic_g(p, n) for n in range(2 * N + 1)]
    gt = [elliptic_g_tilde(p, n) for n in range(max(2 * N - 1, 1))]
    return EllipticMoments(mu, g, gt, [v / gt[0] for v in gt])


@dataclass
class IdentityReport:
    passed: bool
    residuals: dict
    tol: float

    def to_json(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "max_residuals": {k: float(v) for k, v in self.residuals.items()}}


def degenerate_residuals(mu, g, g_tilde, N: int) -> dict:
    """Max residuals of the degenerate-case identities for ``1 <= m, n <= N``.

    ``mu`` / ``g`` / ``g_tilde`` are callables or sequences (``g_tilde`` raw scale).

    * ``moment``: ``mu_n mu_{m+1} g~_{n+m-1} - (g_{n+m+1} - g_{m+1} g_n)``
    * ``derived``: ``g~_n - (g_{n+2} - g_1 g_{n+1}) / (mu_1 mu_{n+1})``, ``0 <= n <= 2N``
    * ``ratio``: ``mu_n mu_m / (mu_1 mu_{n+m-1})`` minus
      ``(g_{n+m} - g_m g_n) / (g_{n+m} - g_1 g_{n+m-1})``
    * ``symmetry``: the right-hand ratio under ``m <-> n``
    """
    M = mu if callable(mu) else mu.__getitem__
    G = g if callable(g) else g.__getitem__
    T = g_tilde if callable(g_tilde) else g_tilde.__getitem__
    res = {"moment": 0.0, "derived": 0.0, "ratio": 0.0, "symmetry": 0.0}
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            r = M(n) * M(m + 1) * T(n + m - 1) - (G(n + m + 1) - G(m + 1) * G(n))
            res["moment"] = max(res["moment"], float(abs(r)))
            lhs = M(n) * M(m) / (M(1) * M(n + m - 1))
            rhs = (G(n + m) - G(m) * G(n)) / (G(n + m) - G(1) * G(n + m - 1))
            swapped = (G(n + m) - G(n) * G(m)) / (G(n + m) - G(1) * G(n + m - 1))
            res["ratio"] = max(res["ratio"], float(abs(lhs - rhs)))
            res["symmetry"] = max(res["symmetry"], float(abs(rhs - swapped)))
    for n in range(2 * N + 1):
        r = T(n) - (G(n + 2) - G(1) * G(n + 1)) / (M(1) * M(n + 1))
        res["derived"] = max(res["derived"], float(abs(r)))
    return res


def check_degenerate_identities(p: EllipticParams, N: int = 8, tol: float = 1e-10) -> IdentityReport:
    res = degenerate_residuals(
        lambda n: elliptic_mu(p, n), lambda n: elliptic_g(p, n), lambda n: elliptic_g_tilde(p, n), N
    )
    if p.mode == EXACT:
        ok = all(v == 0 for v in res.values())
    else:
        ok = all(v < tol for v in res.values())
    return IdentityReport(ok, res, tol)


def elliptic_pochhammer(a, k: int, y) -> Scalar:
    """``[a]_k = y(a) y(a+1) ... y(a+k-1)``; ``[a]_0 = 1``.

    ``y`` is a callable or an :class:`EllipticParams` (its ``y`` is used).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    yf = y.y if isinstance(y, EllipticParams) else y
    out = None
    for i in range(k):
        f = yf(a + i)
        out = f if out is None else out * f
    if out is None:
        return one(y.mode) if isinstance(y, EllipticParams) else 1
    return out


def elliptic_3E2(n: int, a1, a2, b1, b2, p: EllipticParams) -> Polynomial:
    """Coefficients of ``sum_k [-n]_k [a1]_k [a2]_k / ([1]_k [b1]_k [b2]_k) x^k``."""
    coeffs = [one(p.mode)]
    term = one(p.mode)
    for k in range(n):
        # ratio of consecutive terms: y(-n+k) y(a1+k) y(a2+k) / (y(1+k) y(b1+k) y(b2+k))
        num = p.y(-n + k) * p.y(a1 + k) * p.y(a2 + k)
        den = p.y_nonzero(1 + k) * p.y_nonzero(b1 + k, "in 3E2 denominator") * p.y_nonzero(b2 + k, "in 3E2 denominator")
        term = term * num / den
        coeffs.append(term)
    return Polynomial(coeffs, p.mode)


def elliptic_P(n: int, p: EllipticParams) -> Polynomial:
    """Monic ``P_n = B_n 3E2(-n, alpha+n, 1+alpha-beta-n(alpha+n); alpha, alpha-beta-n(alpha+n); x)``."""
    a, b = p.alpha, p.beta
    c = n * (a + n)
    E = elliptic_3E2(n, a + n, 1 + a - b - c, a, a - b - c, p)
    if E.degree < n:
        raise InvalidParameterError(f"3E2 leading coefficient vanishes at n={n}")
    return E.monic()


@dataclass
class EllipticRecurrence:
    A: list
    C: list
    b: list
    u: list


def _A(p: EllipticParams, n: int):
    a, b, y = p.alpha, p.beta, p.y
    num = y(n + a) ** 2 * y(b + a * n + (n + 1) ** 2) * y(b + a * (n - 1) + n * (n - 1))
    den = y(2 * n + a) * y(2 * n + a + 1) * y(b + a * (n - 1) + n**2) * y(b + a * n + n * (n + 1))
    if den == 0:
        raise LatticeCollisionError(f"A_{n} has a vanishing denominator")
    return num / den


def _C(p: EllipticParams, n: int):
    a, b, y = p.alpha, p.beta, p.y
    if n == 0:
        return zero(p.mode)
    num = y(n) ** 2 * y(b + a * (n - 2) + (n - 1) ** 2) * y(b + a * n + n * (n + 1))
    den = y(2 * n + a) * y(2 * n + a - 1) * y(b + a * (n - 1) + n**2) * y(b + a * (n - 1) + n * (n - 1))
    if den == 0:
        raise LatticeCollisionError(f"C_{n} has a vanishing denominator")
    return num / den


def elliptic_recurrence(p: EllipticParams, N: int) -> EllipticRecurrence:
    """``b_n = A_n + C_n`` and ``u_n = A_{n-1} C_n`` for ``P_{n+1} = (x - b_n) P_n - u_n P_{n-1}``.

    ``C_0 = 0`` because of its ``y(0)^2`` factor; ``u_0`` is stored as zero.
    """
    A = [_A(p, n) for n in range(N + 1)]
    C = [_C(p, n) for n in range(N + 1)]
    b = [A[n] + C[n] for n in range(N + 1)]
    u = [zero(p.mode)] + [A[n - 1] * C[n] for n in range(1, N + 1)]
    return EllipticRecurrence(A, C, b, u)


def _rel(p: Polynomial, q: Polynomial) -> float:
    scale = max(q.max_abs(), 1e-300)
    return float(max_coeff_diff(p, q) / scale)


@dataclass
class ThreeWayReport:
    passed: bool
    hankel_vs_recurrence: float
    hankel_vs_direct: float
    recurrence_vs_direct: float
    recurrence_coeffs: float
    tol: float

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("passed", "hankel_vs_recurrence", "hankel_vs_direct", "recurrence_vs_direct", "recurrence_coeffs", "tol")}


def three_way_check(p: EllipticParams, N: int = 6, tol: float = 1e-8) -> ThreeWayReport:
    """Compare ``P_1..P_N`` from the moments, from ``A_n, C_n`` and from the ``3E2`` formula.

    Differences are max-coefficient errors relative to the largest coefficient
    of the reference polynomial; ``recurrence_coeffs`` compares ``b_n, u_n``
    from the moments with ``A_n + C_n`` and ``A_{n-1} C_n``.
    """
    inst = elliptic_instance(p)
    hank = monic_ops_from_moments(inst.g, N)
    rec = elliptic_recurrence(p, N)
    fwd = ops_from_recurrence(rec.b, rec.u, N, p.mode)
    hr = hd = rd = 0.0
    for n in range(1, N + 1):
        direct = elliptic_P(n, p)
        hr = max(hr, _rel(hank[n], fwd[n]))
        hd = max(hd, _rel(hank[n], direct))
        rd = max(rd, _rel(fwd[n], direct))
    rc = 0.0
    for n in range(N):
        rc = max(rc, float(abs(hank.b[n] - rec.b[n]) / max(abs(rec.b[n]), 1e-300)))
        if n >= 1:
            rc = max(rc, float(abs(hank.u[n] - rec.u[n]) / max(abs(rec.u[n]), 1e-300)))
    if p.mode == EXACT:
        ok = hr == hd == rd == rc == 0
    else:
        ok = max(hr, hd, rd, rc) < tol
    return ThreeWayReport(ok, hr, hd, rd, rc, tol)


@dataclass
class ShiftReport:
    passed: bool
    max_residual: float
    per_degree: list
    tol: float

    def to_json(self) -> dict:
        return {"passed": self.passed, "max_residual": self.max_residual, "per_degree": self.per_degree, "tol": self.tol}


def shift_property_check(p: EllipticParams, N: int = 5, tol: float = 1e-8) -> ShiftReport:
    """``Q_n = D P_{n+1} / mu_{n+1}`` against ``P_n`` at ``(alpha + 2, beta + alpha + 2)``, ``n <= N``."""
    inst = elliptic_instance(p)
    P = monic_ops_from_moments(inst.g, N + 1)
    Q = derived_polys(P, inst.D)
    shifted = p.shifted()
    per = []
    for n in range(N + 1):
        target = elliptic_P(n, shifted)
        per.append(_rel(Q[n], target))
    worst = max(per)
    ok = worst == 0 if p.mode == EXACT else worst < tol
    return ShiftReport(ok, worst, per, tol)
