import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from analyzer import SearchBudget, Status
from clutter import (
    THEOREM_INTERSECTION_2_TDI,
    THEOREM_INTERSECTION_3,
    Clutter,
    blocker,
    clutter_brace_search,
    covering_system,
    covering_value,
    format_clutter,
    in_P,
    intersection_profile,
    is_ideal,
    parse_clutter,
    verify_TDD_clutter,
)
from errors import ClutterInvariantError, DegenerateClutterError, InputFormatError, UsageError
from exact_lp import optimal_face, solve
from polyhedron import down_faces
from tilt_brace import verify_brace


@pytest.fixture
def path() -> Clutter:
    """1-2-3 のパスの辺."""
    return Clutter.of(3, [{0, 1}, {1, 2}])


@pytest.fixture
def triangle() -> Clutter:
    return Clutter.of(3, [{0, 1}, {1, 2}, {0, 2}])


def _antichains(n):
    subsets = [
        frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)
    ]

    def grow(i, chosen):
        if i == len(subsets):
            yield tuple(chosen)
            return
        yield from grow(i + 1, chosen)
        S = subsets[i]
        if all(not (S <= T or T <= S) for T in chosen):
            yield from grow(i + 1, chosen + [S])

    return grow(0, [])


def _nondegenerate(n):
    for members in _antichains(n):
        C = Clutter(n, members)
        if not C.is_degenerate:
            yield C


# --- クラッターとブロッカー ---


def test_members_are_sorted():
    C = Clutter.of(3, [{1, 2}, {0}])
    assert C.members == (frozenset({0}), frozenset({1, 2}))
    assert str(C) == "{{1}, {2,3}}"


def test_containment_is_rejected():
    with pytest.raises(ClutterInvariantError) as exc:
        Clutter.of(3, [{0}, {0, 1}])
    assert exc.value.pair == ((0,), (0, 1))


def test_element_out_of_range():
    with pytest.raises(UsageError):
        Clutter.of(2, [{2}])


def test_blocker_examples(path, triangle):
    assert blocker(path) == Clutter.of(3, [{1}, {0, 2}])
    assert blocker(triangle) == triangle
    assert blocker(Clutter.of(2, [{0}, {1}])) == Clutter.of(2, [{0, 1}])
    assert blocker(Clutter.of(2, [])) == Clutter.of(2, [set()])


def test_blocker_of_empty_member():
    with pytest.raises(DegenerateClutterError):
        blocker(Clutter.of(2, [set()]))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_blocker_is_an_involution(n):
    for C in _nondegenerate(n):
        assert blocker(blocker(C)) == C


# --- 理想性と被覆系 ---


def test_is_ideal(path, triangle):
    res = is_ideal(path)
    assert res.holds
    assert set(res.vertices) == {(0, 1, 0), (1, 0, 1)}
    res = is_ideal(triangle)
    assert not res.holds
    assert res.fractional_vertex == (Fraction(1, 2),) * 3
    assert is_ideal(Clutter.of(1, [{0}])).holds


def test_covering_system_layout():
    cs = covering_system(Clutter.of(1, [{0}]))
    assert cs.system.M == ((-1,), (-1,))
    assert cs.system.b == (-1, 0)
    assert cs.member_rows == 1


def test_degenerate_clutters_have_no_covering_system():
    with pytest.raises(DegenerateClutterError):
        covering_system(Clutter.of(2, []))
    with pytest.raises(DegenerateClutterError):
        covering_system(Clutter.of(2, [set()]))


def test_covering_value_matches_system(path):
    cs = covering_system(path)
    for w in [(1, 1, 1), (2, 1, 2), (0, 3, 1)]:
        value = covering_value(path, w)
        assert value == -solve(cs.system, [-v for v in w]).value
    assert covering_value(path, (1, 1, 1)) == 1
    with pytest.raises(UsageError):
        covering_value(path, (-1, 0, 0))


# --- |S ∩ B| ---


@pytest.mark.parametrize("k, expected", [(0, True), (1, True), (2, True), (3, False), (4, True), (6, False)])
def test_in_P(k, expected):
    assert in_P(k) == expected


def test_intersection_profile(path, triangle):
    prof = intersection_profile(path)
    assert prof.max_SB == 1 and prof.all_in_P and prof.binary
    prof = intersection_profile(triangle)
    assert prof.sizes == {1, 2}
    assert prof.all_in_P and not prof.binary
    assert prof.to_dict()["sizes"] == [1, 2]


# --- TDD ---


def test_path_is_TDD(path):
    v = verify_TDD_clutter(path, SearchBudget(weight_box=1))
    assert v.status is Status.CERTIFIED
    assert v.theorem == THEOREM_INTERSECTION_3
    assert v.evidence["tdi"] == THEOREM_INTERSECTION_2_TDI
    assert v.lspec == "L({2})"
    assert v.evidence["cover_value"] == "1"
    v = verify_TDD_clutter(path, SearchBudget(weight_box=3))
    assert v.status is Status.CERTIFIED and v.evidence["scan"]["bad_weight"] is None


def test_triangle_is_not_certified(triangle):
    v = verify_TDD_clutter(triangle, SearchBudget(weight_box=1))
    assert v.status is not Status.CERTIFIED
    assert v.evidence["fractional_vertex"] == ["1/2", "1/2", "1/2"]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_small_ideal_clutters_are_TDD(n):
    budget = SearchBudget(weight_box=1)
    for C in _nondegenerate(n):
        if is_ideal(C).holds:
            assert verify_TDD_clutter(C, budget).status is Status.CERTIFIED


@pytest.mark.parametrize(
    "n, W", [(2, 3), (3, 2), pytest.param(3, 3, marks=pytest.mark.slow)]
)
def test_hypothesis_clutters_scan_clean(n, W):
    for C in _nondegenerate(n):
        if not is_ideal(C).holds or not intersection_profile(C).all_in_P:
            continue
        v = verify_TDD_clutter(C, SearchBudget(weight_box=W))
        assert v.status is Status.CERTIFIED
        assert v.evidence["scan"]["bad_weight"] is None


@pytest.mark.slow
def test_ideal_clutters_on_four_elements_are_TDD():
    budget = SearchBudget(weight_box=3)
    for C in _nondegenerate(4):
        if is_ideal(C).holds:
            assert verify_TDD_clutter(C, budget).status is Status.CERTIFIED


@st.composite
def clutters_on_five(draw):
    sets = draw(
        st.lists(st.frozensets(st.integers(0, 4), min_size=1), min_size=1, max_size=6)
    )
    return Clutter(5, tuple(S for S in set(sets) if not any(T < S for T in sets)))


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(clutters_on_five())
def test_ideal_clutters_on_five_elements_scan_clean(C):
    assume(is_ideal(C).holds and intersection_profile(C).all_in_P)
    v = verify_TDD_clutter(C, SearchBudget(weight_box=3))
    assert v.status is Status.CERTIFIED
    assert v.evidence["scan"]["bad_weight"] is None
    assert v.evidence["cover_value"] == str(covering_value(C, (1,) * 5))


# --- ブレース ---


def test_path_braces_have_gap_one(path):
    system = covering_system(path).system
    F = optimal_face(system, (-1, -1, -1))
    assert F.tight_set == {0, 1, 2, 4}
    downs = down_faces(F)
    assert len(downs) == 4
    for Fplus in downs:
        brace = clutter_brace_search(path, F, Fplus)
        assert brace is not None and brace.gap == 1


@pytest.mark.parametrize("n", [2, 3])
def test_hypothesis_clutter_brace_gaps_are_powers_of_two(n):
    for C in _nondegenerate(n):
        if not is_ideal(C).holds or not intersection_profile(C).all_in_P:
            continue
        system = covering_system(C).system
        for w in itertools.product((0, 1), repeat=n):
            if not any(w):
                continue
            F = optimal_face(system, [-v for v in w])
            for Fplus in down_faces(F):
                brace = clutter_brace_search(C, F, Fplus)
                assert brace is not None, (C, w)
                assert brace.gap in (1, 2, 4)
                assert verify_brace(system, F, Fplus, brace)


def test_brace_search_rejects_foreign_faces(path, triangle):
    system = covering_system(path).system
    F = optimal_face(system, (-1, -1, -1))
    with pytest.raises(UsageError):
        clutter_brace_search(triangle, F, down_faces(F)[0])


# --- テキスト形式 ---


def test_parse_and_format(path):
    text = "# パス\n3\n\n1 2   # 最初の辺\n2 3\n"
    C = parse_clutter(text)
    assert C == path
    assert format_clutter(C) == "3\n1 2\n2 3\n"
    assert parse_clutter(format_clutter(C)) == C


def test_parse_empty_member():
    C = parse_clutter("2\n-\n")
    assert C.is_degenerate
    assert format_clutter(C) == "2\n-\n"


@pytest.mark.parametrize(
    "text, line",
    [("3\n1 4\n", 2), ("x\n", 1), ("3\n1 2\n2 1\n", 3), ("3\n1 a\n", 2), ("", 1)],
)
def test_parse_errors(text, line):
    with pytest.raises(InputFormatError) as exc:
        parse_clutter(text)
    assert exc.value.line == line


def test_parse_containment():
    with pytest.raises(ClutterInvariantError):
        parse_clutter("3\n1\n1 2\n")
