"""Command-line interface: ``umbralpoly {family,check,elliptic,suite}``.

Exit codes: 0 pass, 1 property falsified, 2 degenerate or invalid input,
3 tolerance/convergence failure. The default float tolerance can be set with
``UMBRALPOLY_TOL`` (used for both the absolute and relative parts).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .errors import (
    DegenerateFunctionalError,
    InconsistentSystemError,
    InvalidParameterError,
    LatticeCollisionError,
    ModeMismatchError,
    NumericallySingularError,
    RecurrenceBreakdownError,
    SigmaDomainError,
    UmbralError,
    ZeroDivisionFieldError,
)
from .families import (
    ClassicalParams,
    DunklParams,
    KrallParams,
    QClassicalParams,
    classical_instance,
    dunkl_mu,
    krall_instance,
    q_classical_instance,
)
from .moments import MomentSequence, load_moments
from .orthopoly import monic_ops_from_moments
from .scalars import DEFAULT_TOL, EXACT, FLOAT, Tolerance, coerce, to_json
from .umbral import (
    UmbralDerivative,
    christoffel_factor,
    is_umbral_classical,
    min_linear_recurrence,
    verify_main_system,
)

EXIT_PASS, EXIT_FALSIFIED, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
TOL_ENV = "UMBRALPOLY_TOL"


class UsageError(Exception):
    pass


def _is_float_literal(s: str) -> bool:
    return any(c in s.lower() for c in ".ej")


def _mode_for(values, forced: str) -> str:
    if forced != "auto":
        return forced
    return FLOAT if any(_is_float_literal(str(v)) for v in values if v is not None) else EXACT


def _split(s: str | None, n: int, name: str) -> list[str]:
    if s is None:
        raise UsageError(f"--{name} is required")
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != n:
        raise UsageError(f"--{name} needs {n} comma-separated values, got {len(parts)}")
    return parts


def _tolerance(value: str | None) -> Tolerance:
    if value is None:
        value = os.environ.get(TOL_ENV)
    if value is None:
        return DEFAULT_TOL
    t = float(value)
    if not t >= 0:
        raise UsageError("tolerance must be non-negative")
    return Tolerance(t, t)


def build_instance(args):
    """(name, g, D, tau, params_json) from ``--family`` or from files."""
    fam = args.family
    if fam is None and not (args.moments and args.mu):
        raise UsageError("give --family or both --moments and --mu")
    g = D = tau = None
    params: dict = {}
    if fam == "classical":
        xi, eta = _split(args.xi, 3, "xi"), _split(args.eta, 2, "eta")
        mode = _mode_for(xi + eta, args.mode)
        inst = classical_instance(ClassicalParams(tuple(xi), tuple(eta)), args.depth, mode)
    elif fam == "qclassical":
        xi, eta = _split(args.xi, 3, "xi"), _split(args.eta, 2, "eta")
        if args.q is None:
            raise UsageError("--q is required for the q-classical family")
        mode = _mode_for(xi + eta + [args.q], args.mode)
        inst = q_classical_instance(QClassicalParams(args.q, tuple(xi), tuple(eta)), 2 * args.depth + 2, mode)
    elif fam == "krall":
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta are required for the Krall family")
        mode = _mode_for([args.alpha, args.beta], args.mode)
        inst = krall_instance(KrallParams(args.alpha, args.beta), args.depth, mode)
    elif fam == "dunkl":
        if args.eta is None:
            raise UsageError("--eta is required for the Dunkl family")
        mode = _mode_for([args.eta], args.mode)
        D = dunkl_mu(DunklParams(args.eta), mode)
        params = {"eta": to_json(coerce(args.eta, mode))}
        inst = None
    else:
        inst = None
    if inst is not None:
        g, D, tau, params = inst.g, inst.D, inst.tau, inst.params_json()
    if args.moments:
        g = load_moments(args.moments, None if args.mode == "auto" else args.mode)
        tau = None
    if args.mu:
        mode = g.mode if g is not None else (None if args.mode == "auto" else args.mode)
        mus = load_moments_raw(args.mu, mode)
        D = UmbralDerivative.from_values(mus, mode, label="file")
        tau = None
    return fam or "file", g, D, tau, params


def load_moments_raw(path: str, mode):
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        raw = json.loads(text)
    else:
        raw = [line.split(",")[-1].strip() for line in text.splitlines() if line.strip()]
    if mode is None:
        mode = FLOAT if any(isinstance(v, (float, list)) or _is_float_literal(str(v)) for v in raw) else EXACT
    from .scalars import from_json

    return [from_json(v, mode) for v in raw]


def _perturb(args, g, D):
    if args.perturb_mu:
        k, delta = args.perturb_mu.split(",")
        k, base = int(k), D
        delta = coerce(delta, D.mode)
        D = UmbralDerivative(lambda n: base.mu(n) + (delta if n == k else 0), D.mode, label=f"{D.label}+perturbed")
    if args.perturb_g:
        k, delta = args.perturb_g.split(",")
        k, base = int(k), g
        delta = coerce(delta, g.mode)
        g = MomentSequence(lambda n, _p: base.raw(n) + (delta * base.scale if n == k else 0), g.mode, g.limit)
    return g, D


def _emit(report: dict, args, csv_rows=None):
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows if csv_rows is not None else _flatten(report):
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)) and not _is_complex_pair(obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield [prefix, _csv_value(obj)]


def _is_complex_pair(v):
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)


def _csv_value(v):
    if _is_complex_pair(v):
        return repr(complex(*v))
    if isinstance(v, list):
        return ";".join(str(_csv_value(x)) for x in v)
    if v is None:
        return ""
    return v


def cmd_family(args) -> int:
    name, g, D, _tau, params = build_instance(args)
    N = args.depth
    report = {"family": name, "params": params, "mode": D.mode, "depth": N, "mu": [to_json(v) for v in D.prefix(N + 1)]}
    rows = [["n", "mu", "g", "b", "u", "h"]]
    if g is not None:
        P = monic_ops_from_moments(g, N, _tolerance(args.tol))
        report.update(
            moments=g.to_json(2 * N + 1),
            b=[to_json(v) for v in P.b],
            u=[to_json(v) for v in P.u],
            h=[to_json(v) for v in P.h],
            polys=[p.to_json() for p in P.polys],
        )
        for n in range(2 * N + 1):
            rows.append([
                n,
                _csv_value(report["mu"][n]) if n <= N else "",
                _csv_value(report["moments"][n]),
                _csv_value(report["b"][n]) if n < N else "",
                _csv_value(report["u"][n]) if 1 <= n < N else "",
                _csv_value(report["h"][n]) if n <= N else "",
            ])
    else:
        rows = [["n", "mu"]] + [[n, _csv_value(v)] for n, v in enumerate(report["mu"])]
    _emit(report, args, rows)
    return EXIT_PASS


def cmd_check(args) -> int:
    name, g, D, tau, params = build_instance(args)
    if g is None:
        raise UsageError(f"family {name} provides no moments; pass --moments")
    g, D = _perturb(args, g, D)
    if args.perturb_mu or args.perturb_g:
        tau = None
    tol = _tolerance(args.tol)
    N = args.depth
    rep = is_umbral_classical(g, D, N, tol, tau=tau)
    verdict, main = rep.verdict, rep.main
    if args.perturb_r and rep.R is not None:
        m, s, delta = args.perturb_r.split(",")
        R = rep.R.perturbed(int(m), int(s), delta)
        main = verify_main_system(g, rep.tau, D, R, N, tol)
        verdict = verdict and main.passed
        rep.R = R
    if rep.reason == "gram" or rep.reason == "tau_degenerate":
        failing = rep.gram.worst_cell
        max_res = float(abs(rep.gram.worst_value)) if rep.gram.worst_value is not None else None
    else:
        failing = main.failing_cell if main else None
        max_res = main.max_residual if main else None
    band = rep.R.band_width(tol) if rep.R is not None else None
    report = {
        "verdict": verdict,
        "depth": N,
        "max_residual": max_res,
        "failing_cell": list(failing) if failing else None,
        "band_width": band,
        "reason": rep.reason if not verdict and rep.reason else ("main_system" if not verdict else None),
        "family": name,
        "params": params,
        "mode": D.mode,
        "lambda": [to_json(v) for v in rep.eigen.data.lambda_[: N + 1]] if rep.eigen else None,
        "gram": rep.gram.to_json() if rep.gram else None,
        "mu_recurrence": None,
        "christoffel": None,
    }
    try:
        prof = min_linear_recurrence(D, min(4, N), tol)
    except (IndexError, ValueError):
        prof = None
    if prof is not None:
        report["mu_recurrence"] = prof.to_json()
    if verdict and isinstance(band, int) and prof is not None:
        try:
            report["christoffel"] = christoffel_factor(g, rep.tau, prof.order - 1, tol).to_json()
        except (InconsistentSystemError, ValueError) as exc:
            report["christoffel"] = {"error": str(exc)}
    _emit(report, args)
    return EXIT_PASS if verdict else EXIT_FALSIFIED


def cmd_elliptic(args) -> int:
    from .elliptic import (
        EllipticParams,
        check_degenerate_identities,
        elliptic_instance,
        shift_property_check,
        three_way_check,
    )

    mode = None if args.mode == "auto" else args.mode
    p = EllipticParams.build(args.g2, args.g3, args.w, args.alpha, args.beta, mode)
    ident = check_degenerate_identities(p, args.depth, args.tol)
    three = three_way_check(p, args.poly_depth, args.poly_tol)
    shift = shift_property_check(p, max(args.poly_depth - 1, 0), args.poly_tol)
    report = {
        "params": p.to_json(),
        "mode": p.mode,
        "pipeline": "exact-krall" if p.mode == EXACT else "float-sigma",
        "depth": args.depth,
        "identities": ident.to_json(),
        "three_way": three.to_json(),
        "shift": shift.to_json(),
    }
    ok = ident.passed and three.passed and shift.passed
    if p.mode == EXACT:
        inst = elliptic_instance(p)
        rep = is_umbral_classical(inst.g, inst.D, args.depth, tau=inst.tau)
        report["classical"] = {"verdict": rep.verdict, "band_width": rep.band_width,
                               "lambda": [to_json(v) for v in rep.eigen.data.lambda_] if rep.eigen else None}
        ok = ok and rep.verdict
    else:
        report["sigma"] = {"terms": len(p._sigma.coeffs), "max_radius": p._sigma.max_radius}
    report["verdict"] = ok
    _emit(report, args)
    return EXIT_PASS if ok else EXIT_FALSIFIED


def cmd_suite(args) -> int:
    from .suite import run_all

    results = run_all(seed=args.seed)
    for r in results:
        print(r.line())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([r.to_json() for r in results], fh, indent=2, default=str)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FALSIFIED


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("depth must be at least 1")
    return v


def _nonneg_float(s: str) -> float:
    v = float(s)
    if not v >= 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="umbralpoly", description="Umbral-classical orthogonal polynomial checks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, depth=10):
        p.add_argument("--depth", type=_positive_int, default=depth)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out")
        p.add_argument("--mode", choices=("auto", EXACT, FLOAT), default="auto")
        p.add_argument("--seed", type=int, default=2024)

    for name in ("family", "check"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--family", choices=("classical", "qclassical", "krall", "dunkl"))
        p.add_argument("--xi")
        p.add_argument("--eta")
        p.add_argument("--q")
        p.add_argument("--alpha")
        p.add_argument("--beta")
        p.add_argument("--tol", type=_nonneg_float, default=None)
        p.add_argument("--moments", help="JSON array or CSV of g_0, g_1, ...")
        p.add_argument("--mu", help="JSON array or CSV of mu_0, mu_1, ...")
        if name == "check":
            p.add_argument("--perturb-mu", metavar="N,DELTA")
            p.add_argument("--perturb-g", metavar="N,DELTA")
            p.add_argument("--perturb-r", metavar="M,S,DELTA")

    p = sub.add_parser("elliptic")
    p.add_argument("action", choices=("verify",))
    common(p, depth=8)
    p.add_argument("--g2", default="4")
    p.add_argument("--g3", default="1")
    p.add_argument("--w", default="0.1")
    p.add_argument("--alpha", default="0.3")
    p.add_argument("--beta", default="0.7")
    p.add_argument("--tol", type=_nonneg_float, default=float(os.environ.get(TOL_ENV, 1e-10)))
    p.add_argument("--poly-depth", type=_positive_int, default=6)
    p.add_argument("--poly-tol", type=_nonneg_float, default=1e-8)

    p = sub.add_parser("suite")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out")
    return parser


COMMANDS = {"family": cmd_family, "check": cmd_check, "elliptic": cmd_elliptic, "suite": cmd_suite}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_PASS
    try:
        return COMMANDS[args.command](args)
    except (SigmaDomainError, InconsistentSystemError, NumericallySingularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (
        UsageError,
        DegenerateFunctionalError,
        RecurrenceBreakdownError,
        InvalidParameterError,
        LatticeCollisionError,
        ModeMismatchError,
        ZeroDivisionFieldError,
        ValueError,
        IndexError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UmbralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
