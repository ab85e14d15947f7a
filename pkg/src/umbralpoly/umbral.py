"""Umbral derivatives, raising operators and the umbral-classical verifier.

An umbral derivative acts on monomials as ``D x^n = mu_n x^(n-1)``. Given a
monic OPS ``P_n`` for a functional ``sigma`` it produces the derived monic
polynomials ``Q_n = D P_{n+1} / mu_{n+1}``. The system is *umbral classical*
when the ``Q_n`` are again orthogonal, for some functional ``tau``.

When that happens the raising operator ``R`` with ``R Q_n = nu_{n+1} P_{n+1}``
is fixed by ``nu_{n+1} = mu_{n+1} h~_n / h_{n+1}``, and the pair of functionals
satisfies ``<tau, x^m D x^n> = <sigma, x^n R x^m>`` for all ``m, n``; written out
on monomials this is the main system
``mu_n g~_{n+m-1} = sum_s R_{ms} g_{n+s}``, checked by :func:`verify_main_system`.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import (
    DegenerateFunctionalError,
    InconsistentSystemError,
    InvalidParameterError,
    ZeroDivisionFieldError,
)
from .moments import MomentSequence, bilinear, moments_from_ops
from .orthopoly import GramReport, MonicPolySystem, gram_check, monic_ops_from_moments
from .polynomial import Polynomial, as_polynomial
from .scalars import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    Scalar,
    Tolerance,
    coerce,
    is_zero,
    mode_of,
    one,
    to_json,
    zero,
)


class UmbralDerivative:
    """``D x^n = mu_n x^(n-1)`` with ``mu_0 = 0`` and ``mu_n != 0`` for ``n >= 1``.

    ``mu`` is a callable ``n -> mu_n``; values are cached and validated the
    first time each index is used.
    """

    def __init__(self, mu: Callable[[int], Scalar], mode: str = EXACT, tol: Tolerance | None = None, label: str = ""):
        self._mu = mu
        self.mode = mode
        self.tol = tol or DEFAULT_TOL
        self.label = label
        self._cache: dict[int, Scalar] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_values(cls, values: Sequence, mode: str | None = None, label: str = "") -> "UmbralDerivative":
        vals = list(values)
        if mode is None:
            mode = next((mode_of(v) for v in vals if not isinstance(v, int)), EXACT)
        vals = [coerce(v, mode) for v in vals]

        def mu(n):
            if n >= len(vals):
                raise IndexError(f"mu_{n} requested but only mu_0..mu_{len(vals) - 1} are given")
            return vals[n]

        return cls(mu, mode, label=label)

    def __call__(self, n: int) -> Scalar:
        return self.mu(n)

    def mu(self, n: int) -> Scalar:
        if n < 0:
            raise IndexError("negative index")
        try:
            return self._cache[n]
        except KeyError:
            pass
        value = coerce(self._mu(n), self.mode)
        if n == 0 and not is_zero(value, self.tol):
            raise InvalidParameterError(f"mu_0 must vanish, got {value}")
        if n > 0 and is_zero(value, self.tol):
            raise ZeroDivisionFieldError(f"mu_{n} vanishes")
        with self._lock:
            self._cache[n] = value
        return value

    def prefix(self, n: int) -> list:
        return [self.mu(k) for k in range(n)]

    def apply(self, f) -> Polynomial:
        f = as_polynomial(f, self.mode)
        return Polynomial([self.mu(k + 1) * f[k + 1] for k in range(len(f) - 1)], self.mode)

    def columns(self, N: int) -> list[list]:
        """Monomial-basis columns ``D x^n`` for ``n = 0..N``."""
        return [self.apply(Polynomial.monomial(n, self.mode)).padded(max(n, 1)) for n in range(N + 1)]

    def __repr__(self):
        return f"UmbralDerivative({self.label or 'custom'}, {self.mode})"


def apply_D(D: UmbralDerivative, f) -> Polynomial:
    """``(Df)_k = mu_{k+1} f_{k+1}``."""
    return D.apply(f)


def derived_polys(P: MonicPolySystem | Sequence, D: UmbralDerivative) -> list[Polynomial]:
    """``Q_n = D P_{n+1} / mu_{n+1}`` for every available ``P_{n+1}``."""
    polys = P.polys if isinstance(P, MonicPolySystem) else P
    out = []
    for n in range(len(polys) - 1):
        q = D.apply(polys[n + 1]) * (one(D.mode) / D.mu(n + 1))
        # force the exact monic leading term (float division can leave 1 - eps)
        out.append(Polynomial(list(q.coeffs[:-1]) + [one(D.mode)], D.mode))
    return out


class RaisingOperator:
    """Degree-raising operator stored column-wise in the monomial basis.

    ``columns[n]`` is the coefficient vector of ``R x^n`` (length ``n + 2``).
    ``nu(n + 1) = R_{n,n+1}`` and ``K(n, i) = R_{n,n-i}`` (``K(n, -1) = nu(n+1)``).
    """

    def __init__(self, columns: Sequence[Sequence], mode: str = EXACT):
        self.mode = mode
        self.columns = [list(c) + [zero(mode)] * (n + 2 - len(c)) for n, c in enumerate(columns)]
        for n, c in enumerate(self.columns):
            if len(c) != n + 2:
                raise ValueError(f"column {n} has degree above {n + 1}")

    @property
    def N(self) -> int:
        return len(self.columns) - 1

    def entry(self, n: int, s: int) -> Scalar:
        col = self.columns[n]
        return col[s] if 0 <= s < len(col) else zero(self.mode)

    def nu(self, n: int) -> Scalar:
        """``nu_n = R_{n-1,n}``."""
        return self.columns[n - 1][n]

    def K(self, n: int, i: int) -> Scalar:
        return self.entry(n, n - i)

    def rho(self, n: int) -> Scalar:
        return self.entry(n, n)

    def apply(self, f) -> Polynomial:
        f = as_polynomial(f, self.mode)
        if f.degree > self.N:
            raise ValueError(f"R known only up to degree {self.N}, got degree {f.degree}")
        out = [zero(self.mode)] * (len(f) + 1)
        for n, c in enumerate(f.coeffs):
            if c == 0:
                continue
            for s, r in enumerate(self.columns[n]):
                out[s] += c * r
        return Polynomial(out, self.mode)

    def lowest_offsets(self, tol: Tolerance | None = None) -> list[int]:
        """For each column ``n``: ``n - s_min`` over nonzero entries ``s <= n``
        (``-1`` when only ``nu`` is present)."""
        out = []
        for n, col in enumerate(self.columns):
            nz = [s for s in range(n + 1) if not is_zero(col[s], tol)]
            out.append(n - min(nz) if nz else -1)
        return out

    def band_width(self, tol: Tolerance | None = None):
        """``j`` such that ``R`` has ``j + 1`` diagonals, or ``"nonlocal"``.

        A finite prefix cannot prove locality; the band is accepted when the
        deepest observed offset ``d`` leaves at least as many columns below it
        as it spans, i.e. ``2 (d + 1) <= N + 1``. Otherwise the lower edge keeps
        moving with ``n`` and the operator is reported as nonlocal.
        """
        offsets = self.lowest_offsets(tol)
        d = max(offsets)
        if 2 * (d + 1) <= self.N + 1:
            return d + 1
        return "nonlocal"

    def perturbed(self, n: int, s: int, delta) -> "RaisingOperator":
        cols = [c[:] for c in self.columns]
        cols[n][s] += coerce(delta, self.mode)
        return RaisingOperator(cols, self.mode)

    def to_json(self) -> list:
        return [[to_json(v) for v in c] for c in self.columns]


def construct_R(P, Q, h: Sequence, h_tilde: Sequence, D: UmbralDerivative, tol: Tolerance | None = None) -> RaisingOperator:
    """The raising operator with ``R Q_n = nu_{n+1} P_{n+1}``.

    ``nu_{n+1} = mu_{n+1} h~_n / h_{n+1}``; columns follow by back-substitution in
    the monic ``Q`` basis: ``R x^n = nu_{n+1} P_{n+1} - sum_{s<n} (Q_n)_s R x^s``.
    Builds columns ``0 .. len(Q) - 1``; needs ``P`` and ``h`` one index further.
    """
    Ppolys = P.polys if isinstance(P, MonicPolySystem) else P
    mode = D.mode
    cols = []
    for n, q in enumerate(Q):
        if is_zero(h[n + 1], tol):
            raise DegenerateFunctionalError(f"h_{n + 1} vanishes", index=n + 2)
        nu = D.mu(n + 1) * h_tilde[n] / h[n + 1]
        col = Ppolys[n + 1].padded(n + 2)
        col = [nu * c for c in col]
        for s in range(n):
            qs = q[s]
            if qs == 0:
                continue
            for k, r in enumerate(cols[s]):
                col[k] -= qs * r
        cols.append(col)
    return RaisingOperator(cols, mode)


@dataclass
class MainSystemReport:
    passed: bool
    depth: int
    max_residual: float
    failing_cell: tuple | None
    residuals: dict = field(repr=False, default_factory=dict)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "depth": self.depth,
            "max_residual": self.max_residual,
            "failing_cell": list(self.failing_cell) if self.failing_cell else None,
        }


def verify_main_system(
    g: MomentSequence,
    g_tilde,
    D: UmbralDerivative,
    R: RaisingOperator,
    N: int,
    tol: Tolerance | None = None,
) -> MainSystemReport:
    """Residuals of ``mu_n g~_{n+m-1} = sum_{s=0}^{m+1} R_{ms} g_{n+s}``, ``0 <= m, n <= N``.

    ``g_tilde`` is a sequence or :class:`MomentSequence`; its scale must match
    the scale used to build ``R`` (raw values are used for a MomentSequence).
    Exact mode passes only with every residual exactly zero.
    """
    tol = tol or DEFAULT_TOL
    if isinstance(g_tilde, MomentSequence):
        gt = g_tilde.raw_prefix(max(2 * N, 1))
    else:
        gt = list(g_tilde)
    gv = g.prefix(2 * N + 2)
    residuals = {}
    worst, worst_bad, failing = 0.0, -1.0, None
    for m in range(N + 1):
        col = R.columns[m]
        for n in range(N + 1):
            lhs = D.mu(n) * gt[n + m - 1] if n + m >= 1 else zero(D.mode)
            rhs = sum((col[s] * gv[n + s] for s in range(m + 2)), zero(D.mode))
            r = lhs - rhs
            residuals[(m, n)] = r
            size = float(abs(r))
            worst = max(worst, size)
            bad = r != 0 if D.mode == EXACT else not tol.close(complex(lhs), complex(rhs))
            if bad and size > worst_bad:
                worst_bad, failing = size, (m, n)
    return MainSystemReport(failing is None, N, worst, failing, residuals)


@dataclass
class EigenData:
    lambda_: tuple
    tau_seq: tuple

    def distinct(self, tol: Tolerance | None = None) -> bool:
        vals = self.lambda_
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                if is_zero(vals[i] - vals[j], tol):
                    return False
        return True


@dataclass
class EigenReport:
    passed: bool
    max_residual_L: float
    max_residual_Ltilde: float
    data: EigenData
    lambda_distinct: bool

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual_L": self.max_residual_L,
            "max_residual_Ltilde": self.max_residual_Ltilde,
            "lambda": [to_json(v) for v in self.data.lambda_],
            "lambda_distinct": self.lambda_distinct,
        }


def compose_columns(outer, inner_columns: Sequence[Sequence], mode: str) -> list[list]:
    """Columns of ``outer o inner`` where ``outer`` is anything with ``apply``."""
    return [outer.apply(Polynomial(c, mode)).coeffs for c in inner_columns]


def eigen_data(D: UmbralDerivative, R: RaisingOperator) -> EigenData:
    """``lambda_n = mu_n nu_n`` and ``tau_n = mu_n rho_{n-1}``.

    ``tau_n`` is the subdiagonal of ``L = R D`` in the monomial basis,
    ``L x^n = lambda_n x^n + tau_n x^(n-1) + ...``.
    """
    mode = D.mode
    lam = [zero(mode)] + [D.mu(n) * R.nu(n) for n in range(1, R.N + 2)]
    tau = [zero(mode)] + [D.mu(n) * R.rho(n - 1) for n in range(1, R.N + 2)]
    return EigenData(tuple(lam), tuple(tau))


def eigen_check(P, Q, D: UmbralDerivative, R: RaisingOperator, tol: Tolerance | None = None) -> EigenReport:
    """Residuals of ``R D P_n = lambda_n P_n`` and ``D R Q_n = lambda_{n+1} Q_n``."""
    tol = tol or DEFAULT_TOL
    Ppolys = P.polys if isinstance(P, MonicPolySystem) else P
    data = eigen_data(D, R)
    lam = data.lambda_
    res_L = 0.0
    ok = True
    for n in range(min(len(Ppolys), R.N + 2)):
        lhs = R.apply(D.apply(Ppolys[n])) if n > 0 else Polynomial([], D.mode)
        diff = lhs - Ppolys[n] * lam[n]
        r = diff.max_abs()
        res_L = max(res_L, float(r))
        if D.mode == EXACT:
            ok = ok and not diff.coeffs
        else:
            ok = ok and r <= tol.abs_eps + tol.rel_eps * max(Ppolys[n].max_abs() * abs(lam[n]), 1.0)
    res_Lt = 0.0
    for n in range(min(len(Q), R.N + 1)):
        lhs = D.apply(R.apply(Q[n]))
        diff = lhs - Q[n] * lam[n + 1]
        r = diff.max_abs()
        res_Lt = max(res_Lt, float(r))
        if D.mode == EXACT:
            ok = ok and not diff.coeffs
        else:
            ok = ok and r <= tol.abs_eps + tol.rel_eps * max(Q[n].max_abs() * abs(lam[n + 1]), 1.0)
    return EigenReport(ok, res_L, res_Lt, data, data.distinct(tol))


def operator_columns(op, N: int, mode: str = EXACT) -> list[list]:
    """Monomial columns ``op(x^n)``, ``n = 0..N`` for a callable or ``apply``-able operator."""
    call = op.apply if hasattr(op, "apply") else op
    return [as_polynomial(call(Polynomial.monomial(n, mode)), mode).coeffs for n in range(N + 1)]


def apply_columns(columns: Sequence[Sequence], f: Polynomial, mode: str) -> Polynomial:
    out: list = []
    for n, c in enumerate(f.coeffs):
        if c == 0:
            continue
        col = columns[n]
        if len(out) < len(col):
            out += [zero(mode)] * (len(col) - len(out))
        for s, v in enumerate(col):
            out[s] += c * v
    return Polynomial(out, mode)


def symmetry_check(L_columns: Sequence[Sequence], g: MomentSequence, f, h, tol: Tolerance | None = None) -> bool:
    """``<sigma, f L h> == <sigma, h L f>`` for an operator given by monomial columns."""
    f = as_polynomial(f, g.mode)
    h = as_polynomial(h, g.mode)
    left = bilinear(g, f, apply_columns(L_columns, h, g.mode))
    right = bilinear(g, h, apply_columns(L_columns, f, g.mode))
    if g.mode == EXACT:
        return left == right
    return (tol or DEFAULT_TOL).close(complex(left), complex(right))


@dataclass
class ClassicalReport:
    """Outcome of :func:`is_umbral_classical`.

    ``reason`` is ``None`` on success, otherwise ``"gram"``, ``"main_system"``
    or ``"tau_degenerate"``.
    """

    verdict: bool
    depth: int
    reason: str | None
    P: MonicPolySystem
    Q: list
    tau: MomentSequence | None
    gram: GramReport | None
    R: RaisingOperator | None = None
    main: MainSystemReport | None = None
    eigen: EigenReport | None = None
    h_tilde: list = field(default_factory=list)

    @property
    def band_width(self):
        return self.R.band_width() if self.R is not None else None

    def to_json(self) -> dict:
        main = self.main
        return {
            "verdict": self.verdict,
            "depth": self.depth,
            "reason": self.reason,
            "max_residual": main.max_residual if main else None,
            "failing_cell": list(main.failing_cell) if main and main.failing_cell else None,
            "band_width": self.band_width,
            "gram": self.gram.to_json() if self.gram else None,
            "eigen": self.eigen.to_json() if self.eigen else None,
        }


def is_umbral_classical(
    g: MomentSequence,
    D: UmbralDerivative,
    N: int = 10,
    tol: Tolerance | None = None,
    tau: MomentSequence | None = None,
) -> ClassicalReport:
    """Decide whether ``Q_0 .. Q_N`` are orthogonal for some functional.

    Without ``tau`` the candidate functional is recovered from
    ``<tau, Q_n> = 0`` for ``n = 1..2N`` (this pins down ``g~_0 .. g~_{2N}``, enough
    for the Gram matrix of ``Q_0 .. Q_N``). With ``tau`` given, its moments are
    used as-is and ``R`` is scaled to its raw normalization.

    Success additionally requires the main system to vanish on the
    ``(N+1) x (N+1)`` grid, so a verdict of ``True`` certifies both
    formulations of the property up to depth ``N``.
    Raises :class:`DegenerateFunctionalError` when ``g`` itself is degenerate.
    """
    tol = tol or DEFAULT_TOL
    if tau is None:
        P = monic_ops_from_moments(g, 2 * N + 1, tol)
        Qall = derived_polys(P, D)
        tau_seq = moments_from_ops(Qall[1:], D.mode)
        scale = one(D.mode)
    else:
        P = monic_ops_from_moments(g, N + 1, tol)
        Qall = derived_polys(P, D)
        tau_seq = tau
        scale = tau.scale
    Q = Qall[: N + 1]
    Psmall = MonicPolySystem(P.polys[: N + 2], P.b[: N + 1], P.u[: N + 1], P.h[: N + 2], P.mode)
    gram = gram_check(Q, tau_seq, tol)
    if gram.zero_diagonal is not None:
        return ClassicalReport(False, N, "tau_degenerate", Psmall, Q, tau_seq, gram)
    h_tilde = [gram.matrix[n][n] * scale for n in range(N + 1)]
    R = construct_R(Psmall, Q, Psmall.h, h_tilde, D, tol)
    main = verify_main_system(g, tau_seq, D, R, N, tol)
    eig = eigen_check(Psmall, Q, D, R, tol) if gram.passed else None
    verdict = gram.passed and main.passed
    reason = None if verdict else ("gram" if not gram.passed else "main_system")
    return ClassicalReport(verdict, N, reason, Psmall, Q, tau_seq, gram, R, main, eig, h_tilde)


# -- constant-coefficient recurrences for mu ---------------------------------


@dataclass
class RecurrenceProfile:
    """``sum_i alpha_i mu_{n-i} = 0`` for ``n >= order``, with ``alpha_0 = 1``.

    After :func:`normalize_profile`: ``q`` is the root used to rescale
    ``mu_n -> q^n mu_n`` (``alpha`` is then the rescaled vector, summing to
    zero) and ``beta`` satisfies ``sum_i beta_i mu_{n-i} = 1`` for the
    rescaled ``mu``.
    """

    alpha: tuple
    beta: tuple | None = None
    q: Scalar | None = None
    gamma: Scalar | None = None
    condition: float | None = None

    @property
    def order(self) -> int:
        return len(self.alpha) - 1

    @property
    def j(self) -> int:
        return self.order - 1

    def characteristic_roots(self) -> np.ndarray:
        """Roots of ``alpha_0 q^r + alpha_1 q^(r-1) + ... + alpha_r``."""
        return np.roots([complex(a) for a in self.alpha])

    def to_json(self) -> dict:
        return {
            "alpha": [to_json(a) for a in self.alpha],
            "order": self.order,
            "beta": [to_json(b) for b in self.beta] if self.beta is not None else None,
            "q": to_json(self.q) if self.q is not None else None,
        }


def _as_list(mu, length=None) -> list:
    if isinstance(mu, UmbralDerivative):
        return mu.prefix(length)
    return list(mu)


def min_linear_recurrence(mu, max_order: int, tol: Tolerance | None = None) -> RecurrenceProfile | None:
    """Smallest-order constant-coefficient recurrence satisfied on the whole prefix.

    The recurrence must hold for every ``n`` with ``order <= n < len(mu)``,
    which includes the boundary ``mu_0 = 0``. Exact mode computes the nullspace
    exactly; float mode decides rank by SVD against ``tol.rel_eps`` and reports
    the condition estimate. Returns ``None`` when nothing up to ``max_order``
    fits; a found order ``r`` always has ``alpha_r != 0``.
    """
    tol = tol or DEFAULT_TOL
    vals = _as_list(mu, 2 * max_order + 2)
    if len(vals) < 2 * max_order + 2:
        raise ValueError(f"need at least {2 * max_order + 2} values of mu")
    exact = all(mode_of(v) == EXACT for v in vals)
    for r in range(1, max_order + 1):
        rows = [[vals[n - i] for i in range(r + 1)] for n in range(r, len(vals))]
        if exact:
            basis = linalg.nullspace_exact(rows, r + 1)
            if len(basis) != 1:
                continue
            alpha = basis[0]
            cond = None
        else:
            null, cond = linalg.nullspace_float(rows, tol.rel_eps)
            if null.shape[1] != 1:
                continue
            alpha = list(null[:, 0])
        if is_zero(alpha[0], tol) or is_zero(alpha[-1], tol):
            continue
        lead = alpha[0]
        alpha = tuple(a / lead for a in alpha)
        if not exact:
            alpha = tuple(complex(a) for a in alpha)
        return RecurrenceProfile(alpha, condition=cond)
    return None


def _rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Rational roots of ``sum_i coeffs[i] q^i`` (rational root theorem)."""
    import math as _m

    den = 1
    for c in coeffs:
        den = _m.lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    roots = []
    if ints and ints[0] == 0:
        roots.append(Fraction(0))
        while ints and ints[0] == 0:
            ints.pop(0)
    if len(ints) < 2:
        return roots

    def divisors(k):
        k = abs(k)
        return [d for d in range(1, k + 1) if k % d == 0]

    for p in divisors(ints[0]):
        for q in divisors(ints[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and sum(c * cand**i for i, c in enumerate(ints)) == 0:
                    roots.append(cand)
    return roots


def _pick_root(roots):
    """Prefer ``|q|`` closest to 1, then the smallest argument in ``[0, 2 pi)``."""
    nz = [r for r in roots if r != 0]

    def key(r):
        z = complex(r)
        arg = cmath.phase(z) % (2 * math.pi)
        return (round(abs(abs(z) - 1.0), 12), round(arg, 12))

    return min(nz, key=key)


def normalize_profile(profile: RecurrenceProfile, mu, tol: Tolerance | None = None) -> RecurrenceProfile:
    """Rescale so that ``sum alpha_i = 0`` and attach ``beta`` with ``sum beta_i mu_{n-i} = 1``.

    A nonzero root ``q`` of ``sum_i alpha_i q^i`` is chosen (closest to the unit
    circle, then smallest argument); ``mu_n -> q^n mu_n`` maps ``alpha_i`` to
    ``q^i alpha_i``. Then ``beta_i = gamma * sum_{s<=i} alpha_s`` and ``gamma``
    makes the invariant sum equal to one. Exact mode only accepts rational
    roots; the identity is verified on the whole prefix.
    """
    tol = tol or DEFAULT_TOL
    alpha = list(profile.alpha)
    r = len(alpha) - 1
    vals = _as_list(mu, 2 * r + 2)
    exact = all(mode_of(a) == EXACT for a in alpha) and all(mode_of(v) == EXACT for v in vals)
    if exact:
        roots = _rational_roots(alpha)
        if not [x for x in roots if x != 0]:
            raise InvalidParameterError("no rational normalizing root; rerun in float mode")
    else:
        roots = list(np.roots([complex(a) for a in reversed(alpha)]))
        alpha = [complex(a) for a in alpha]
        vals = [complex(v) for v in vals]
    if not [x for x in roots if x != 0]:
        raise AssertionError("characteristic polynomial has only the zero root")
    q = _pick_root(roots)
    if not exact:
        q = complex(q)
        if abs(q - round(q.real)) < 1e-12:
            q = complex(round(q.real))
    alpha_q = [a * q**i for i, a in enumerate(alpha)]
    mu_q = [v * q**n for n, v in enumerate(vals)]
    partial = []
    acc = zero(EXACT if exact else FLOAT)
    for i in range(r):
        acc = acc + alpha_q[i]
        partial.append(acc)
    Y = sum((partial[i] * mu_q[r - 1 - i] for i in range(r)), zero(EXACT if exact else FLOAT))
    if is_zero(Y, tol):
        raise InvalidParameterError("invariant sum vanishes: recurrence order is not minimal")
    gamma = 1 / Y
    beta = tuple(gamma * p for p in partial)
    for n in range(r - 1, len(mu_q)):
        s = sum((beta[i] * mu_q[n - i] for i in range(r)), zero(EXACT if exact else FLOAT))
        if not is_zero(s - 1, tol, scale=max(1.0, max(abs(v) for v in mu_q))):
            raise AssertionError(f"beta identity fails at n={n}")
    return RecurrenceProfile(tuple(alpha_q), beta, q, gamma, profile.condition)


@dataclass
class ChristoffelFactor:
    epsilon: tuple
    pi: Polynomial
    j: int
    max_residual: float

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "epsilon": [to_json(e) for e in self.epsilon],
            "pi": self.pi.to_json(),
            "max_residual": self.max_residual,
        }


def christoffel_factor(g: MomentSequence, g_tilde, j: int, tol: Tolerance | None = None, count: int | None = None) -> ChristoffelFactor:
    """Solve ``g~_{n+j-1} = sum_{s=-1}^{j} eps_s g_{n+j-s}`` for constant ``eps``.

    Equivalent to ``x^(j-1) tau = pi(x) sigma`` with
    ``pi(x) = sum_s eps_s x^(j-s)``. Uses every available equation (``count``
    of them, default: as many as ``g_tilde`` supplies) and raises
    :class:`InconsistentSystemError` when the overdetermined system has no
    solution.
    """
    tol = tol or DEFAULT_TOL
    if j < 1:
        raise ValueError("j must be at least 1")
    if isinstance(g_tilde, MomentSequence):
        length = g_tilde.limit + 1 if g_tilde.limit is not None else 4 * (j + 2) + j
        gt = g_tilde.prefix(length)
    else:
        gt = list(g_tilde)
    rows, rhs = [], []
    for n in range(len(gt) - j + 1):
        if count is not None and len(rows) >= count:
            break
        rows.append([g[n + j - s] for s in range(-1, j + 1)])
        rhs.append(gt[n + j - 1])
    if len(rows) < j + 2:
        raise ValueError("not enough moments to determine the Christoffel factor")
    if g.mode == EXACT:
        eps = linalg.solve_exact(rows, rhs)
        resid = 0.0
    else:
        x, resid = linalg.solve_float(rows, rhs)
        if resid > max(tol.rel_eps, tol.abs_eps):
            raise InconsistentSystemError(f"Christoffel system inconsistent (relative residual {resid:.3g})")
        eps = [complex(v) for v in x]
    pi = Polynomial([eps[j - k + 1] for k in range(j + 2)], g.mode)
    return ChristoffelFactor(tuple(eps), pi, j, resid)


@dataclass
class KCheckReport:
    passed: bool
    max_residual: float
    residuals: dict

    def to_json(self):
        return {"passed": self.passed, "max_residual": self.max_residual}


def k_coefficient_check(R: RaisingOperator, profile: RecurrenceProfile, N: int | None = None, tol: Tolerance | None = None) -> KCheckReport:
    """Each diagonal ``K_m^{(s)}`` solves the reversed recurrence.

    Checks ``sum_{k=0}^{r} alpha_k K_{m+k}^{(s)} = 0`` for ``s = -1..r-1`` and all
    ``m`` with ``m + r <= N`` (``K^{(-1)}_m = nu_{m+1}``; entries below the
    diagonal truncation count as zero).
    """
    tol = tol or DEFAULT_TOL
    N = R.N if N is None else min(N, R.N)
    alpha = profile.alpha
    r = len(alpha) - 1
    residuals = {}
    worst, ok = 0.0, True
    for s in range(-1, r):
        for m in range(0, N - r + 1):
            val = sum((alpha[k] * R.K(m + k, s) for k in range(r + 1)), zero(R.mode))
            residuals[(s, m)] = val
            worst = max(worst, float(abs(val)))
            scale = max(float(abs(R.K(m + k, s))) for k in range(r + 1))
            if R.mode == EXACT:
                ok = ok and val == 0
            else:
                ok = ok and abs(val) <= tol.abs_eps + tol.rel_eps * scale
    return KCheckReport(ok, worst, residuals)


def equivalence_transform(g: MomentSequence, D: UmbralDerivative, alpha, q, p) -> tuple[MomentSequence, UmbralDerivative]:
    """``mu_n -> alpha q^n mu_n`` and ``g_n -> p^n g_n``."""
    mode = D.mode
    a, qq, pp = (coerce(v, mode) for v in (alpha, q, p))
    for name, v in (("alpha", a), ("q", qq), ("p", pp)):
        if is_zero(v):
            raise InvalidParameterError(f"equivalence parameter {name} must be nonzero")
    D2 = UmbralDerivative(lambda n: a * qq**n * D.mu(n), mode, D.tol, label=f"{D.label}*equiv")
    return g.scaled(pp), D2


def build_local_D(roots: Sequence, weights: Sequence, mode: str | None = None, label: str = "local") -> UmbralDerivative:
    """``mu_n = sum_k w_k(n) q_k^n``.

    A weight is a scalar ``a_k`` or a tuple ``(c_0, c_1, ...)`` meaning the
    polynomial ``c_0 + c_1 n + ...`` (repeated characteristic roots). The
    constant terms must cancel so ``mu_0 = 0``. For scalar weights the
    operator is ``D = x^{-1} sum_k a_k T_k`` with ``T_k f(x) = f(q_k x)``.
    """
    if len(roots) != len(weights):
        raise ValueError("one weight per root")
    ws = [tuple(w) if isinstance(w, (tuple, list)) else (w,) for w in weights]
    if mode is None:
        flat = list(roots) + [c for w in ws for c in w]
        mode = FLOAT if any(mode_of(v) == FLOAT for v in flat) else EXACT
    qs = [coerce(q, mode) for q in roots]
    ws = [tuple(coerce(c, mode) for c in w) for w in ws]
    if not is_zero(sum((w[0] for w in ws), zero(mode))):
        raise InvalidParameterError("weights must sum to zero so that mu_0 = 0")

    def mu(n):
        total = zero(mode)
        for q, w in zip(qs, ws):
            poly = sum((c * n**i for i, c in enumerate(w)), zero(mode))
            total += poly * q**n
        return total

    D = UmbralDerivative(mu, mode, label=label)
    D.roots, D.weights = tuple(qs), tuple(ws)
    return D


def describe_local_D(D: UmbralDerivative) -> str:
    """Operator form of a :func:`build_local_D` derivative, for display."""
    terms = []
    for q, w in zip(D.roots, D.weights):
        if len(w) == 1:
            terms.append(f"({w[0]})*T[{q}]")
        else:
            terms.append(f"({' + '.join(f'{c}*n^{i}' for i, c in enumerate(w))})@T[{q}]")
    return "x^-1 (" + " + ".join(terms) + ")"
