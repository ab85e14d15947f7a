from fractions import Fraction as F

import numpy as np
import pytest

from umbralpoly import linalg
from umbralpoly.errors import InconsistentSystemError, ModeMismatchError
from umbralpoly.polynomial import Polynomial, from_roots, x_poly


def test_polynomial_arithmetic():
    p = Polynomial([1, 2])
    q = Polynomial([F(-1, 2), 0, 1])
    assert (p * q).coeffs == (F(-1, 2), -1, 1, 2)
    assert (p - p).degree == -1
    assert (q + 1)[0] == F(1, 2)
    assert q.monic() == q and (q * 3).monic() == q
    assert p[-1] == 0 and p[5] == 0
    assert from_roots([1, 2]) == Polynomial([2, -3, 1])
    assert x_poly()(F(3)) == 3


def test_polynomial_mode_mixing():
    with pytest.raises(ModeMismatchError):
        Polynomial([1, F(1, 2)]) + Polynomial([0.5 + 0j])


def test_polynomial_json():
    assert Polynomial([F(1, 3), 0, 2]).to_json() == ["1/3", "0", "2"]


def test_exact_det_and_minors():
    H = [[F(1, i + j + 1) for j in range(4)] for i in range(4)]
    assert linalg.det_exact(H) == F(1, 6048000)
    assert linalg.leading_minors_exact(H)[1] == F(1, 12)
    assert linalg.det_exact([[0, 1], [1, 0]]) == -1


def test_exact_nullspace_and_solve():
    rows = [[1, 2, 3], [2, 4, 6]]
    basis = linalg.nullspace_exact(rows, 3)
    assert len(basis) == 2
    assert all(sum(r[k] * v[k] for k in range(3)) == 0 for v in basis for r in rows)
    assert linalg.solve_exact([[1, 1], [1, -1], [2, 0]], [3, 1, 4]) == [2, 1]
    with pytest.raises(InconsistentSystemError):
        linalg.solve_exact([[1, 1], [1, 1]], [1, 2])


def test_float_solvers():
    x, res = linalg.solve_float([[1, 1], [1, -1]], [3, 1])
    assert np.allclose(x, [2, 1]) and res < 1e-14
    null, cond = linalg.nullspace_float([[1, 2], [2, 4]], 1e-10)
    assert null.shape[1] == 1 and abs(null[0, 0] * 1 + null[1, 0] * 2) < 1e-12
