"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and shown in the terminal summary.
"""

import pytest

from umbralpoly import suite

RESULTS = []


def _run(fn, **kw):
    res = fn(**kw)
    RESULTS.append(res.line())
    print(res.line())
    failed = {k: v for k, v in res.details.items() if v is False}
    assert res.passed, f"{res.line()} failing checks: {failed}"
    return res


def test_criterion_1_classical_hahn():
    _run(suite.criterion_1)


def test_criterion_2_q_classical():
    _run(suite.criterion_2)


def test_criterion_3_krall_jacobi():
    _run(suite.criterion_3)


def test_criterion_4_elliptic():
    res = _run(suite.criterion_4)
    vals = res.details["values"]
    assert vals["identities"]["ratio"] < 1e-10
    assert vals["three_way"]["hankel_vs_direct"] < 1e-8
    assert vals["shift"] < 1e-8
    assert vals["sigma_oracle"] < 1e-12


@pytest.mark.parametrize("seed", [2024, 7])
def test_criterion_5_structural_battery(seed):
    _run(suite.criterion_5, seed=seed)


def test_criterion_6_negative_controls():
    res = _run(suite.criterion_6)
    codes = res.details["exit_codes"]
    assert sum(1 for name, argv, expected in suite.NEGATIVE_CONTROLS if expected == 1 and codes[name] == 1) >= 3
