from fractions import Fraction

import pytest
from hypothesis import given

from errors import UsageError
from simplex import LpStatus, feasible_point, in_cone, maximize, minimize
from strategies import bounded_systems, weights


def _dot(a, b):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))


def test_maximize_vertex(system2):
    out = maximize(system2.M, system2.b, (0, 1))
    assert out.status is LpStatus.OPTIMAL
    assert out.value == 3
    assert out.primal == (0, 3)
    assert out.dual == (1, 1, 0)


def test_minimize_sign(system2):
    out = minimize(system2.M, system2.b, (1, 1))
    assert out.is_optimal
    assert out.value == 0
    assert out.primal == (0, 0)


def test_unbounded_reports_ray():
    out = maximize([[-1]], [0], [1])
    assert out.status is LpStatus.UNBOUNDED
    assert out.ray[0] > 0


def test_infeasible():
    out = maximize([[1], [-1]], [-1, -1], [0])
    assert out.status is LpStatus.INFEASIBLE
    assert feasible_point([[1], [-1]], [-1, -1], 1) is None


def test_no_rows():
    assert maximize([], [], [0, 0]).value == 0
    assert maximize([], [], [1, 0]).status is LpStatus.UNBOUNDED


def test_dimension_mismatch():
    with pytest.raises(UsageError):
        maximize([[1, 2]], [1, 2], [1, 1])


def test_in_cone():
    gens = [(1, 0), (1, 1)]
    assert in_cone(gens, (2, 1))
    assert not in_cone(gens, (0, 1))
    assert in_cone([], (0, 0))
    assert not in_cone([], (1, 0))


@given(bounded_systems(), weights(2))
def test_strong_duality_and_complementary_slackness(system, w):
    out = maximize(system.M, system.b, w)
    assert out.is_optimal
    x, y = out.primal, out.dual
    assert all(_dot(row, x) <= bi for row, bi in zip(system.M, system.b))
    assert all(v >= 0 for v in y)
    for j in range(system.n):
        assert sum(y[i] * system.M[i][j] for i in range(system.m)) == w[j]
    assert _dot(w, x) == out.value == _dot(system.b, y)
    for i in range(system.m):
        if y[i] > 0:
            assert _dot(system.M[i], x) == system.b[i]
