"""ランダムな系に対する性質テスト."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from analyzer import (
    SearchBudget,
    Status,
    certify_TD_in_L,
    check_TDI_at,
    decide_TDI_nondegenerate,
    dual_has_L_point,
    near_TDI_sample,
    search_bad_weight,
)
from exact_linalg import LSpec, nullspace
from exact_lp import is_admissible, optimal_face, strictly_complementary_dual
from polyhedron import down_faces, is_integral, is_non_degenerate, lattice_points
from strategies import bounded_systems, small_systems, weights
from tilt_brace import perturbed_weight, sample_rhos, tilt_constraint, tilt_satisfied


def _dot(a, x):
    return sum((Fraction(p) * q for p, q in zip(a, x)), Fraction(0))


def _pairs(system, w):
    F = optimal_face(system, w)
    for Fplus in down_faces(F):
        yield F, Fplus


@given(bounded_systems(), weights(2))
def test_tilt_is_independent_of_rho(system, w):
    for F, Fplus in _pairs(system, w):
        tilts = {
            tilt_constraint(system, w, F, Fplus, rho)
            for rho in sample_rhos(system, F, Fplus, 3)
        }
        assert len(tilts) == 1


@given(bounded_systems(), weights(2))
def test_dual_optimum_satisfies_tilt(system, w):
    y = strictly_complementary_dual(system, w)
    for F, Fplus in _pairs(system, w):
        t = tilt_constraint(system, w, F, Fplus)
        assert tilt_satisfied(t, [y[i] for i in t.index_set])


@given(bounded_systems(), weights(2), st.integers(-2, 2))
def test_perturbation_equivalences(system, w, shift):
    y = strictly_complementary_dual(system, w)
    for F, Fplus in _pairs(system, w):
        t = tilt_constraint(system, w, F, Fplus)
        base = [y[i] for i in t.index_set]
        candidates = [base, [Fraction(0)] * len(base)]
        for k in range(len(base)):
            u = list(base)
            u[k] += shift
            candidates.append(u)
        directions = nullspace([system.M[i] for i in Fplus.indices], system.n)
        for u in candidates:
            w_bar, tau_bar = perturbed_weight(system, t, u)
            in_span = all(_dot(w_bar, d) == 0 for d in directions)
            constant = in_span and _dot(w_bar, Fplus.point) == tau_bar
            assert constant == in_span == tilt_satisfied(t, u)


@given(bounded_systems(max_extra=2))
def test_hierarchy_on_random_systems(system):
    budget = SearchBudget(weight_box=1, prime_sample=(2,))
    tdi = decide_TDI_nondegenerate(system)
    if tdi.status is Status.CERTIFIED:
        assert is_integral(system).holds
        assert near_TDI_sample(system, budget).status is not Status.REFUTED
        for w in [(1, 0), (0, 1), (1, 1), (-1, 1)]:
            assert check_TDI_at(system, w).holds


@given(bounded_systems(), weights(2))
def test_two_and_three_imply_every_prime(system, w):
    ok2 = dual_has_L_point(system, w, LSpec.of(2)).ok
    ok3 = dual_has_L_point(system, w, LSpec.of(3)).ok
    if not (ok2 and ok3):
        return
    for p in (5, 7):
        assert dual_has_L_point(system, w, LSpec.of(p)).ok


@given(bounded_systems(max_extra=2))
def test_non_degenerate_near_tdi_refutation_refutes_tdi(system):
    if not is_non_degenerate(system).holds:
        return
    near = near_TDI_sample(system, SearchBudget(weight_box=1, prime_sample=(2, 3)))
    if near.status is Status.REFUTED:
        assert decide_TDI_nondegenerate(system).status is Status.REFUTED


@given(bounded_systems(n=1, max_extra=2))
def test_dual_two_and_three_on_a_line_imply_integral(system):
    if is_integral(system).holds:
        return
    budget = SearchBudget(weight_box=1)
    bad2 = search_bad_weight(system, LSpec.of(2), budget).bad
    bad3 = search_bad_weight(system, LSpec.of(3), budget).bad
    assert bad2 is not None or bad3 is not None


@settings(max_examples=30, deadline=None)
@given(bounded_systems(max_extra=2), st.sampled_from([(2,), (2, 3)]))
def test_certified_TD_in_L_is_integral(system, primes):
    if certify_TD_in_L(system, LSpec.of(*primes)).status is Status.CERTIFIED:
        assert is_integral(system).holds


def _scaled_dual_point(system, w, k):
    """双対最適面に分母 k の点があるか (z = k·y を整数点として探す)."""
    F = optimal_face(system, w)
    m, n = system.m, system.n
    eq_rows = [[system.M[i][c] for i in range(m)] for c in range(n)]
    eq_rhs = [k * v for v in w]
    for i in range(m):
        if i not in F.tight_set:
            eq_rows.append([int(i == j) for j in range(m)])
            eq_rhs.append(0)
    ineq = [[-int(i == j) for j in range(m)] for i in range(m)]
    return lattice_points(eq_rows, eq_rhs, ineq, [0] * m, m, radius=2 * k).first() is not None


@given(small_systems(), weights(2, bound=2), st.sampled_from([2, 3]))
def test_dual_L_point_agrees_with_denominator_enumeration(system, w, p):
    if not is_admissible(system, w):
        return
    L = LSpec.of(p)
    res = dual_has_L_point(system, w, L)
    if res.ok and res.exact:
        y = res.witness
        assert all(v >= 0 and L.contains(v) for v in y)
        assert all(
            sum(y[i] * system.M[i][j] for i in range(system.m)) == w[j]
            for j in range(system.n)
        )
    if any(_scaled_dual_point(system, w, k) for k in L.s_numbers(2)):
        assert res.ok
