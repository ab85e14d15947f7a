"""The acceptance battery, shared by the test suite and ``umbralpoly suite``.

Each ``criterion_*`` function runs one block of checks and returns a
:class:`CriterionResult`; the wall-clock limit is part of the verdict.
"""

from __future__ import annotations

import cmath
import json
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction as F

from .elliptic import (
    EllipticParams,
    SigmaEvaluator,
    check_degenerate_identities,
    elliptic_instance,
    elliptic_recurrence,
    shift_property_check,
    sigma_reference_with_tail,
    three_way_check,
)
from .families import (
    ClassicalParams,
    DunklParams,
    KrallParams,
    QClassicalParams,
    classical_instance,
    classical_mu,
    dunkl_mu,
    krall_instance,
    q_classical_instance,
)
from .moments import MomentSequence
from .orthopoly import gram_check, monic_ops_from_moments
from .polynomial import Polynomial
from .umbral import (
    UmbralDerivative,
    christoffel_factor,
    compose_columns,
    derived_polys,
    equivalence_transform,
    is_umbral_classical,
    k_coefficient_check,
    min_linear_recurrence,
    symmetry_check,
    verify_main_system,
)

LEGENDRE = ClassicalParams((1, -1, 0), (2, -1))
HERMITE = ClassicalParams((0, 0, 1), (-2, 0))
LAGUERRE = ClassicalParams((0, 1, 0), (-1, F(3, 2)))
# little q-Jacobi with a = b = 1: g_n = (1 - q) / (1 - q^(n+1))
Q_LEGENDRE = QClassicalParams(F(1, 2), (1, -1, 0), (F(-1, 4), F(1, 2)))
ELLIPTIC_POINT = dict(g2=4, g3=1, w=0.1, alpha=0.3, beta=0.7)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    elapsed: float
    limit: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({self.elapsed:.2f}s / {self.limit:.0f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "elapsed": self.elapsed,
            "limit": self.limit,
            "details": self.details,
        }


def _finish(number, title, checks: dict, start: float, limit: float) -> CriterionResult:
    elapsed = time.perf_counter() - start
    checks["runtime"] = elapsed < limit
    return CriterionResult(number, title, all(v is True for v in checks.values()), elapsed, limit, checks)


def generalized_hermite(eta) -> MomentSequence:
    """Moments of ``|x|^(2 eta) exp(-x^2)``, normalized: ``g_{2k} = (eta + 1/2)_k``, odd ones zero."""
    eta = F(eta)

    def g(n):
        if n % 2:
            return F(0)
        v = F(1)
        for i in range(n // 2):
            v *= i + eta + F(1, 2)
        return v

    return MomentSequence.from_function(g)


def criterion_1() -> CriterionResult:
    start = time.perf_counter()
    inst = classical_instance(LEGENDRE, N=12)
    checks = {"moments": all(inst.g[n] == F(1, n + 1) for n in range(25))}
    P = monic_ops_from_moments(inst.g, 25)
    Q = derived_polys(P, inst.D)
    derivative_form = all(
        Q[n].coeffs == tuple(F(k + 1, n + 1) * P[n + 1][k + 1] for k in range(n + 1)) for n in range(13)
    )
    rep = is_umbral_classical(inst.g, inst.D, 12)
    G = rep.gram.matrix
    checks["derived_is_derivative"] = derivative_form
    checks["gram_offdiag_exactly_zero"] = rep.gram.passed and all(
        G[i][j] == 0 for i in range(13) for j in range(13) if i != j
    )
    main = verify_main_system(inst.g, rep.tau, inst.D, rep.R, 9)
    checks["main_system_exact"] = main.passed and main.max_residual == 0
    return _finish(1, "classical Hahn/Legendre exact", checks, start, 5.0)


def criterion_2() -> CriterionResult:
    start = time.perf_counter()
    inst = q_classical_instance(Q_LEGENDRE, N=10)
    rep = is_umbral_classical(inst.g, inst.D, 10)
    prof = min_linear_recurrence(inst.D, 3)
    checks = {
        "classical_depth_10": rep.verdict,
        "two_diagonal": rep.band_width == 1,
        "mu_recurrence": prof is not None and prof.alpha == (1, F(-3, 2), F(1, 2)),
    }
    return _finish(2, "q-classical q=1/2 exact", checks, start, 5.0)


def criterion_3(N: int = 12) -> CriterionResult:
    start = time.perf_counter()
    inst = krall_instance(KrallParams(2, 3), N)
    p = EllipticParams.build(0, 0, 1, 2, 3)
    rec = elliptic_recurrence(p, N)
    P = monic_ops_from_moments(inst.g, N + 1)
    checks = {
        "g1": inst.g[1] == F(8, 9),
        "b0": rec.b[0] == F(8, 9) and P.b[0] == F(8, 9),
        "b_matches": all(P.b[n] == rec.A[n] + rec.C[n] for n in range(N + 1)),
        "u_matches": all(P.u[n] == rec.A[n - 1] * rec.C[n] for n in range(1, N + 1)),
    }
    rep = is_umbral_classical(inst.g, inst.D, N)
    checks["Q_orthogonal_exact"] = rep.verdict and rep.gram.passed
    ratios = {inst.tau.raw(n) / rep.tau[n] for n in range(2 * N + 1)}
    checks["tau_single_scalar"] = len(ratios) == 1
    shifted = krall_instance(KrallParams(4, 7), N)
    Ps = monic_ops_from_moments(shifted.g, N)
    checks["shift_equals_4_7"] = all(rep.Q[n] == Ps[n] for n in range(N + 1))
    checks["shift_property_check"] = shift_property_check(p, N).passed
    return _finish(3, "Krall-Jacobi (2,3) exact", checks, start, 10.0)


def sigma_oracle_check(points: int = 100, radius: float = 1.2, seed: int = 0, g2=4, g3=1):
    s = SigmaEvaluator(g2, g3)
    rng = random.Random(seed)
    worst = tail = 0.0
    for _ in range(points):
        z = rng.uniform(0, radius) * cmath.exp(1j * rng.uniform(0, 2 * cmath.pi))
        ref, t = sigma_reference_with_tail(z, g2, g3)
        worst = max(worst, abs(s(z) - ref) / max(1.0, abs(ref)))
        tail = max(tail, t)
    return worst, tail


def criterion_4() -> CriterionResult:
    start = time.perf_counter()
    p = EllipticParams.build(**ELLIPTIC_POINT)
    ident = check_degenerate_identities(p, 8, 1e-10)
    three = three_way_check(p, 6, 1e-8)
    shift = shift_property_check(p, 5, 1e-8)
    oracle, tail = sigma_oracle_check()
    checks = {
        "red_mu_c_below_1e-10": ident.residuals["ratio"] < 1e-10,
        "identities_below_1e-10": ident.passed,
        "three_way_below_1e-8": three.passed,
        "shift_below_1e-8": shift.passed,
        "sigma_oracle_below_1e-12": oracle < 1e-12 and tail < 1e-20,
    }
    res = _finish(4, "elliptic generic point (4,1,0.1,0.3,0.7)", checks, start, 60.0)
    res.details["values"] = {
        "identities": ident.residuals,
        "three_way": three.to_json(),
        "shift": shift.max_residual,
        "sigma_oracle": oracle,
    }
    return res


def _rand_rational(rng, lo=1, hi=5):
    while True:
        v = F(rng.randint(-hi, hi), rng.randint(lo, hi))
        if v != 0:
            return v


def _battery_families():
    """(name, g, D, local) for the structural battery."""
    leg = classical_instance(LEGENDRE, N=8)
    her = classical_instance(HERMITE, N=8)
    lag = classical_instance(LAGUERRE, N=8)
    ql = q_classical_instance(Q_LEGENDRE, N=8)
    kr = krall_instance(KrallParams(2, 3), N=8)
    return [
        ("legendre", leg.g, leg.D),
        ("hermite", her.g, her.D),
        ("laguerre", lag.g, lag.D),
        ("q-legendre", ql.g, ql.D),
        ("dunkl", generalized_hermite(F(1, 2)), dunkl_mu(DunklParams(F(1, 2)))),
        ("krall", kr.g, kr.D),
    ]


def criterion_5(seed: int = 2024, depth: int = 6) -> CriterionResult:
    start = time.perf_counter()
    rng = random.Random(seed)
    fams = _battery_families()
    leg_g = fams[0][1]
    broken = ("legendre-broken-mu", leg_g, UmbralDerivative(lambda n: n + (F(1, 7) if n == 3 else 0)))
    checks = {}
    details = {}

    equiv_ok = True
    for name, g, D in fams + [broken]:
        base = is_umbral_classical(g, D, depth).verdict
        for _ in range(20):
            a, q, pp = (_rand_rational(rng) for _ in range(3))
            g2, D2 = equivalence_transform(g, D, a, q, pp)
            if is_umbral_classical(g2, D2, depth).verdict != base:
                equiv_ok = False
                details.setdefault("equivalence_failures", []).append([name, str(a), str(q), str(pp)])
    checks["equivalence_preserves_verdict"] = equiv_ok

    sym_ok = True
    for name, g, D in fams[:3]:
        rep = is_umbral_classical(g, D, 10)
        L = compose_columns(rep.R, D.columns(10), D.mode)
        for _ in range(50 if name == "legendre" else 17):
            f = Polynomial([_rand_rational(rng) for _ in range(rng.randint(1, 10))])
            h = Polynomial([_rand_rational(rng) for _ in range(rng.randint(1, 10))])
            sym_ok = sym_ok and symmetry_check(L, g, f, h)
    checks["symmetry_exact"] = sym_ok

    order_band, kcheck, christ = True, True, True
    table = {}
    for name, g, D in fams:
        rep = is_umbral_classical(g, D, 10)
        prof = min_linear_recurrence(D, 4)
        band = rep.band_width
        table[name] = {"band_width": band, "mu_order": prof.order if prof else None}
        if band == "nonlocal":
            order_band = order_band and prof is None
            continue
        order_band = order_band and prof is not None and prof.order <= band + 1 and band <= prof.order
        if band == 1:
            order_band = order_band and prof.order == 2
        if name in ("legendre", "hermite", "laguerre", "q-legendre"):
            kcheck = kcheck and k_coefficient_check(rep.R, prof).passed
        if prof.order == 2:
            cf = christoffel_factor(g, rep.tau, 1)
            christ = christ and cf.pi.degree <= 2
            table[name]["pi"] = cf.pi.to_json()
    checks["order_band_correspondence"] = order_band
    checks["k_coefficient_check"] = kcheck
    checks["christoffel_deg_le_2"] = christ
    res = _finish(5, "structural property battery", checks, start, 60.0)
    res.details["table"] = table
    res.details.update(details)
    return res


NEGATIVE_CONTROLS = [
    ("perturbed mu", ["check", "--family", "classical", "--xi", "1,-1,0", "--eta", "2,-1", "--perturb-mu", "3,1/7"], 1),
    ("perturbed moments", ["check", "--family", "classical", "--xi", "1,-1,0", "--eta", "2,-1", "--perturb-g", "5,1/100"], 1),
    ("perturbed R entry", ["check", "--family", "classical", "--xi", "1,-1,0", "--eta", "2,-1", "--perturb-r", "2,1,1/3"], 1),
    ("g_0 = 0 moments file", ["check", "--moments", "{zero_file}", "--mu", "{mu_file}"], 2),
    ("beta = alpha", ["elliptic", "verify", "--g2", "4", "--g3", "1", "--w", "0.1", "--alpha", "0.3", "--beta", "0.3"], 2),
]


def criterion_6() -> CriterionResult:
    from .cli import main

    start = time.perf_counter()
    checks = {}
    codes = {}
    with tempfile.TemporaryDirectory() as tmp:
        zero_file = os.path.join(tmp, "zero.json")
        mu_file = os.path.join(tmp, "mu.json")
        with open(zero_file, "w") as fh:
            json.dump(["0", "1/2", "1/3", "1/4", "1/5"], fh)
        with open(mu_file, "w") as fh:
            json.dump([str(n) for n in range(12)], fh)
        for name, argv, expected in NEGATIVE_CONTROLS:
            argv = [a.format(zero_file=zero_file, mu_file=mu_file) for a in argv]
            code = main(argv + ["--out", os.path.join(tmp, "report.json")])
            codes[name] = code
            checks[name] = code == expected
    res = _finish(6, "negative controls", checks, start, 60.0)
    res.details["exit_codes"] = codes
    return res


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6]


def run_all(seed: int = 2024) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        out.append(fn(seed=seed) if fn is criterion_5 else fn())
    return out
