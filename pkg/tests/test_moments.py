import json
from fractions import Fraction as F

import pytest

from umbralpoly.errors import DegenerateFunctionalError, RecurrenceBreakdownError
from umbralpoly.moments import (
    MomentSequence,
    apply_functional,
    bilinear,
    hankel_determinants,
    hankel_matrix,
    load_moments,
    moments_from_ops,
    moments_from_recurrence,
)
from umbralpoly.polynomial import Polynomial
from umbralpoly.scalars import EXACT, FLOAT

# (n + 2) g_{n+1} - (n + 1) g_n = 0  ->  g_n = 1 / (n + 1)
UNIFORM = lambda n: (n + 2, -n - 1, 0)  # noqa: E731


def test_recurrence_gives_uniform_moments():
    g = moments_from_recurrence(UNIFORM, 1, 24)
    assert [g[n] for n in range(25)] == [F(1, n + 1) for n in range(25)]


def test_recurrence_float_matches_exact():
    g = moments_from_recurrence(UNIFORM, 1, 10, FLOAT)
    assert all(abs(g[n] - 1 / (n + 1)) < 1e-15 for n in range(11))


def test_recurrence_breakdown_reports_index():
    with pytest.raises(RecurrenceBreakdownError) as exc:
        moments_from_recurrence(lambda n: (n - 3, 1, 0), 1, 10)
    assert exc.value.index == 3


def test_normalization_keeps_scale():
    g = MomentSequence.from_values([2, 1, F(2, 3)])
    assert g[0] == 1 and g[1] == F(1, 2)
    assert g.scale == 2 and g.raw(2) == F(2, 3)


def test_zero_mass_is_degenerate():
    with pytest.raises(DegenerateFunctionalError) as exc:
        MomentSequence.from_values([0, 1, 2])
    assert exc.value.index == 1


def test_finite_data_limit():
    g = MomentSequence.from_values([1, 2, 3])
    with pytest.raises(IndexError):
        g[3]


def test_hilbert_hankel_determinants():
    g = MomentSequence.from_function(lambda n: F(1, n + 1))
    rep = hankel_determinants(g, 4)
    assert rep.values == (1, F(1, 12), F(1, 2160), F(1, 6048000))
    assert rep.nondegenerate


def test_two_point_measure_is_degenerate_at_three():
    # delta_{-1} + delta_{1}: moments 1, 0, 1, 0, ...
    g = MomentSequence.from_function(lambda n: F(1 - n % 2))
    assert hankel_determinants(g, 4).first_zero == 3
    gf = MomentSequence.from_function(lambda n: complex(1 - n % 2), FLOAT)
    assert hankel_determinants(gf, 4).first_zero == 3


def test_hankel_matrix_shape():
    g = MomentSequence.from_function(lambda n: F(n + 1))
    assert hankel_matrix(g, 2) == [[1, 2], [2, 3]]


def test_bilinear_and_apply():
    g = MomentSequence.from_function(lambda n: F(1, n + 1))
    x = Polynomial([0, 1])
    assert bilinear(g, x, x) == F(1, 3)
    assert apply_functional(g, Polynomial([1, -2])) == 0


def test_moments_from_ops_inverts_orthogonality():
    # monic shifted Legendre P_1, P_2 annihilated by the uniform functional
    Q = [Polynomial([1]), Polynomial([F(-1, 2), 1]), Polynomial([F(1, 6), -1, 1])]
    g = moments_from_ops(Q)
    assert [g[n] for n in range(3)] == [1, F(1, 2), F(1, 3)]


def test_moments_from_ops_requires_monic():
    with pytest.raises(ValueError):
        moments_from_ops([Polynomial([1, 2])])


def test_load_json_and_csv(tmp_path):
    pj = tmp_path / "g.json"
    pj.write_text(json.dumps(["1", "1/2", "1/3"]))
    g = load_moments(str(pj))
    assert g.mode == EXACT and g[2] == F(1, 3)
    pc = tmp_path / "g.csv"
    pc.write_text("0,1\n1,0.5\n2,0.25\n")
    g = load_moments(str(pc), FLOAT)
    assert g.mode == FLOAT and g[2] == 0.25


def test_scaled_sequence():
    g = MomentSequence.from_function(lambda n: F(1, n + 1))
    s = g.scaled(2)
    assert s[3] == F(8, 4)
