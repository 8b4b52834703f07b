from fractions import Fraction

import pytest
from hypothesis import given

from errors import AdmissibilityError, UsageError
from exact_lp import (
    dual_affine_hull,
    is_admissible,
    optimal_face,
    solve,
    strictly_complementary_dual,
)
from polyhedron import enumerate_faces
from simplex import in_cone
from strategies import bounded_systems, weights


def test_optimal_face_edge(system2):
    F = optimal_face(system2, (1, 1))
    assert F.tight_set == {0}
    assert F.dim == 1


def test_optimal_face_vertex(system2):
    assert optimal_face(system2, (0, 1)).tight_set == {0, 1}


def test_zero_weight_gives_whole_polyhedron(system2):
    assert optimal_face(system2, (0, 0)).tight_set == frozenset()


def test_admissibility(system4):
    assert is_admissible(system4, (1,))
    assert not is_admissible(system4, (-1,))
    with pytest.raises(AdmissibilityError):
        optimal_face(system4, (-1,))


def test_weight_length_checked(system2):
    with pytest.raises(UsageError):
        solve(system2, (1,))


def test_strictly_complementary_dual(system2, system4):
    assert strictly_complementary_dual(system4, (1,)) == (Fraction(1, 4), Fraction(1, 6))
    assert strictly_complementary_dual(system2, (1, 1)) == (1, 0, 0)


def test_strictly_complementary_dual_above_one(system2, system3):
    # 唯一の双対解の成分が 1 を超える
    assert strictly_complementary_dual(system2, (0, 2)) == (2, 2, 0)
    assert strictly_complementary_dual(system3, (-2, -2)) == (0, 0, 2, 2)


def test_strictly_complementary_dual_unbounded_face(point_system):
    # y1 - y2 = 1, y >= 0 は非有界
    y = strictly_complementary_dual(point_system, (1,))
    assert y[0] > 0 and y[1] > 0
    assert y[0] - y[1] == 1


def test_dual_affine_hull(system4):
    H = dual_affine_hull(system4, (1,))
    assert H.dim == 1
    assert H.contains((Fraction(1, 2), 0))
    assert H.contains((0, Fraction(1, 3)))
    assert not H.contains((1, 0))


def test_dual_affine_hull_fixes_loose_rows(system2):
    H = dual_affine_hull(system2, (1, 1))
    assert H.dim == 0
    assert H.point() == (1, 0, 0)


@given(bounded_systems(), weights(2))
def test_strict_complementarity(system, w):
    F = optimal_face(system, w)
    y = strictly_complementary_dual(system, w)
    assert all((y[i] > 0) == (i in F.tight_set) for i in range(system.m))
    for j in range(system.n):
        assert sum(y[i] * system.M[i][j] for i in range(system.m)) == w[j]
    assert sum(y[i] * system.b[i] for i in range(system.m)) == solve(system, w).value
    assert dual_affine_hull(system, w).contains(y)


@given(bounded_systems(), weights(2))
def test_optimal_faces_are_cone_membership(system, w):
    opt = optimal_face(system, w)
    for F in enumerate_faces(system):
        inside = F.tight_set >= opt.tight_set
        assert inside == in_cone([system.M[i] for i in F.indices], w)
