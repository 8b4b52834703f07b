"""クラッター・ブロッカー・理想性と、被覆系 M(C)x <= d(C) の TDD 判定.

要素は内部では 0 始まり。テキスト形式と表示は 1 始まり。
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import config
from analyzer import (
    WEIGHT_SCAN,
    SearchBudget,
    Status,
    Verdict,
    one_based,
    search_bad_weight,
    vec_str,
)
from errors import (
    ClutterInvariantError,
    DegenerateClutterError,
    InputFormatError,
    InternalError,
    ResourceLimitError,
    UsageError,
)
from exact_linalg import LSpec, Rat
from polyhedron import Face, LinearSystem, face_lattice_points, is_integral, minimal_faces
from simplex import minimize
from tilt_brace import Brace, find_brace, verify_brace

logger = logging.getLogger(__name__)

THEOREM_INTERSECTION_POWERS = "clutter-intersection-powers"
THEOREM_INTERSECTION_3 = "clutter-intersection-3"
THEOREM_BINARY_5 = "binary-clutter-dyadic"
THEOREM_INTERSECTION_2_TDI = "clutter-intersection-2-tdi"


def _member_key(S: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(S))


def _fmt_set(S: Iterable[int]) -> str:
    return "{" + ",".join(str(e + 1) for e in sorted(S)) + "}"


@dataclass(frozen=True)
class Clutter:
    """台集合 [n] 上の包含関係のない部分集合族. members は辞書順に整列済み."""

    ground_size: int
    members: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.ground_size < 0:
            raise UsageError("台集合のサイズは 0 以上が必要です")
        members = {frozenset(S) for S in self.members}
        for S in members:
            bad = [e for e in S if not 0 <= e < self.ground_size]
            if bad:
                raise UsageError(
                    f"要素 {bad[0] + 1} は台集合 [1..{self.ground_size}] の外です"
                )
        ordered = tuple(sorted(members, key=lambda S: (len(S), _member_key(S))))
        for A, B in itertools.combinations(ordered, 2):
            if A <= B:
                raise ClutterInvariantError((_member_key(A), _member_key(B)))
        object.__setattr__(self, "members", tuple(sorted(members, key=_member_key)))

    @classmethod
    def of(cls, n: int, members: Iterable[Iterable[int]]) -> Clutter:
        return cls(n, tuple(frozenset(S) for S in members))

    @property
    def is_degenerate(self) -> bool:
        """∅ または {∅}."""
        return not self.members or frozenset() in self.members

    def require_nondegenerate(self) -> None:
        if self.is_degenerate:
            raise DegenerateClutterError(
                "空のクラッターと {∅} には多面体操作を適用できません"
            )

    def __str__(self) -> str:
        return "{" + ", ".join(_fmt_set(S) for S in self.members) + "}"


# --- テキスト形式 (1 行目 n, 以降 1 行 1 メンバー, 1 始まり) ---


def parse_clutter(text: str) -> Clutter:
    """テキスト形式を読む. 空行と # 以降は無視し、"-" だけの行は空集合."""
    n: int | None = None
    members: list[tuple[frozenset[int], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise InputFormatError(f"台集合のサイズ n が必要です: {line!r}", lineno) from None
            if n < 0:
                raise InputFormatError("n は 0 以上が必要です", lineno)
            continue
        if line == "-":
            members.append((frozenset(), lineno))
            continue
        try:
            elems = [int(tok) for tok in line.split()]
        except ValueError:
            raise InputFormatError(f"整数以外の要素があります: {line!r}", lineno) from None
        for e in elems:
            if not 1 <= e <= n:
                raise InputFormatError(f"要素 {e} は 1..{n} の範囲外です", lineno)
        members.append((frozenset(e - 1 for e in elems), lineno))
    if n is None:
        raise InputFormatError("空のファイルです", 1)
    seen: dict[frozenset[int], int] = {}
    for S, lineno in members:
        if S in seen:
            raise InputFormatError(f"メンバー {_fmt_set(S)} が重複しています", lineno)
        seen[S] = lineno
    return Clutter.of(n, seen)


def format_clutter(C: Clutter) -> str:
    lines = [str(C.ground_size)]
    for S in C.members:
        lines.append(" ".join(str(e + 1) for e in sorted(S)) if S else "-")
    return "\n".join(lines) + "\n"


# --- ブロッカー ---


def _hits_all(B: frozenset[int], members: Sequence[frozenset[int]]) -> bool:
    return all(B & S for S in members)


def blocker(C: Clutter) -> Clutter:
    """極小な被覆 (すべてのメンバーと交わる集合) の族 b(C)."""
    if frozenset() in C.members:
        raise DegenerateClutterError("∅ をメンバーに持つクラッターには被覆がありません")
    n = C.ground_size
    if n > config.BLOCKER_CAP:
        raise ResourceLimitError("DUALCERT_BLOCKER_CAP", n, config.BLOCKER_CAP)
    found: list[frozenset[int]] = []
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            B = frozenset(combo)
            if any(A <= B for A in found):
                continue
            if _hits_all(B, C.members):
                found.append(B)
    return Clutter(n, tuple(found))


def incidence_matrix(C: Clutter) -> list[tuple[int, ...]]:
    """T(C): 行がメンバーの特性ベクトル."""
    return [
        tuple(int(e in S) for e in range(C.ground_size)) for S in C.members
    ]


def incidence_vector(S: Iterable[int], n: int) -> tuple[int, ...]:
    S = set(S)
    return tuple(int(e in S) for e in range(n))


# --- 被覆系 ---


@dataclass(frozen=True)
class CoveringSystem:
    """M(C) = [-T(C); -I], d(C) = (-1, ..., -1, 0, ..., 0)."""

    clutter: Clutter
    system: LinearSystem

    @property
    def member_rows(self) -> int:
        return len(self.clutter.members)


def covering_system(C: Clutter) -> CoveringSystem:
    C.require_nondegenerate()
    n = C.ground_size
    T = incidence_matrix(C)
    M = [tuple(-v for v in row) for row in T]
    M += [tuple(-int(i == j) for j in range(n)) for i in range(n)]
    d = [-1] * len(T) + [0] * n
    return CoveringSystem(C, LinearSystem.of(M, d))


def covering_value(C: Clutter, w: Sequence[Rat | int]) -> Rat:
    """min{wᵀx : T(C)x >= 1, x >= 0} (w >= 0)."""
    C.require_nondegenerate()
    if len(w) != C.ground_size or any(Fraction(v) < 0 for v in w):
        raise UsageError("被覆 LP の重みは長さ n の非負ベクトルが必要です")
    n = C.ground_size
    rows: list[list[int]] = [[-v for v in row] for row in incidence_matrix(C)]
    rhs: list[int] = [-1] * len(rows)
    for j in range(n):
        rows.append([-int(i == j) for i in range(n)])
        rhs.append(0)
    out = minimize(rows, rhs, [Fraction(v) for v in w])
    if not out.is_optimal:
        raise InternalError(f"被覆 LP が最適解を持ちません ({out.status.value})")
    return out.value


# --- 理想性 ---


@dataclass(frozen=True)
class IdealResult:
    holds: bool
    fractional_vertex: tuple[Rat, ...] | None = None
    vertices: tuple[tuple[Rat, ...], ...] = ()


def is_ideal(C: Clutter) -> IdealResult:
    """被覆多面体 {x >= 0 : T(C)x >= 1} が整数的か.

    理想的なら頂点集合がブロッカーの特性ベクトル全体と一致することも確かめる。
    """
    cs = covering_system(C)
    res = is_integral(cs.system)
    vertices = tuple(sorted(F.point for F in minimal_faces(cs.system)))
    if not res.holds:
        return IdealResult(False, res.witness.point, vertices)
    expected = sorted(
        tuple(Fraction(v) for v in incidence_vector(B, C.ground_size))
        for B in blocker(C).members
    )
    if list(vertices) != expected:
        raise InternalError(
            f"{C} の被覆多面体の頂点がブロッカーの特性ベクトルと一致しません"
        )
    return IdealResult(True, None, vertices)


# --- |S ∩ B| の分布 ---


def in_P(k: int) -> bool:
    """k ∈ {0} ∪ {2^i : i >= 0}."""
    return k == 0 or (k > 0 and k & (k - 1) == 0)


@dataclass(frozen=True)
class IntersectionProfile:
    max_SB: int
    all_in_P: bool  # すべての |S ∩ B| - 1 が {0, 1, 2, 4, ...} に入る
    binary: bool  # すべての |S ∩ B| が奇数
    sizes: frozenset[int] = frozenset()

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_SB": self.max_SB,
            "all_in_P": self.all_in_P,
            "binary": self.binary,
            "sizes": sorted(self.sizes),
        }


def intersection_profile(C: Clutter, blk: Clutter | None = None) -> IntersectionProfile:
    C.require_nondegenerate()
    blk = blocker(C) if blk is None else blk
    sizes = frozenset(len(S & B) for S in C.members for B in blk.members)
    return IntersectionProfile(
        max(sizes, default=0),
        all(in_P(k - 1) for k in sizes),
        all(k % 2 == 1 for k in sizes),
        sizes,
    )


def _applicable_theorem(profile: IntersectionProfile) -> str | None:
    if not profile.all_in_P:
        return None
    if profile.max_SB <= 3:
        return THEOREM_INTERSECTION_3
    if profile.binary and profile.max_SB <= 5:
        return THEOREM_BINARY_5
    return THEOREM_INTERSECTION_POWERS


# --- TDD 判定 ---


def clutter_weights(n: int, W: int) -> Iterable[tuple[int, ...]]:
    """w ∈ [0, W]^n を辞書順に."""
    return itertools.product(range(W + 1), repeat=n)


def verify_TDD_clutter(C: Clutter, budget: SearchBudget | None = None) -> Verdict:
    """被覆系の TDD 判定.

    非負重み w ∈ [0, W]^n を (P:M(C),d(C),-w) として走査する。理想的で
    すべての |S ∩ B| - 1 が {0} ∪ {2^i} に入るなら、箱の外も含めて TDD が定理で保証される。
    """
    budget = budget or SearchBudget()
    cs = covering_system(C)
    ideal = is_ideal(C)
    blk = blocker(C)
    profile = intersection_profile(C, blk)
    n = C.ground_size
    weights = (tuple(-v for v in w) for w in clutter_weights(n, budget.weight_box))
    scan = search_bad_weight(cs.system, LSpec.of(2), budget, weights)
    bad = None if scan.bad is None else tuple(-v for v in scan.bad)
    evidence: dict[str, Any] = {
        "clutter": str(C),
        "ideal": ideal.holds,
        "profile": profile.to_dict(),
        "blocker": str(blk),
        "scan": {**scan.to_dict(), "bad_weight": None if bad is None else list(bad)},
    }
    if not ideal.holds:
        evidence["fractional_vertex"] = vec_str(ideal.fractional_vertex)
    else:
        # 理想的なら w = 1 の被覆 LP の値は最小のブロッカー要素の大きさ
        tau = covering_value(C, (1,) * n)
        if tau != min(len(B) for B in blk.members):
            raise InternalError(f"{C} の被覆 LP の値 {tau} がブロッカーと一致しません")
        evidence["cover_value"] = str(tau)
    theorem = _applicable_theorem(profile) if ideal.holds else None
    if theorem is not None:
        if bad is not None:
            raise InternalError(
                f"定理の仮定を満たす {C} で悪い重み w = {bad} が見つかりました"
            )
        if profile.max_SB <= 2:
            evidence["tdi"] = THEOREM_INTERSECTION_2_TDI
        return Verdict("TDD", Status.CERTIFIED, LSpec.of(2).label, theorem, evidence)
    if bad is not None:
        evidence["bad_weight"] = list(bad)
        return Verdict("TDD", Status.REFUTED, LSpec.of(2).label, WEIGHT_SCAN, evidence)
    return Verdict("TDD", Status.UNDECIDED, LSpec.of(2).label, None, evidence)


# --- ブレース探索 ---


def _best_brace(
    system: LinearSystem, F: Face, Fplus: Face, candidates: Iterable[tuple[int, ...]]
) -> Brace | None:
    hull_plus = Fplus.affine_hull()
    hull = F.affine_hull()
    separating = sorted(F.tight_set - Fplus.tight_set)
    best: Brace | None = None
    for rho in candidates:
        if not hull_plus.contains(rho) or hull.contains(rho):
            continue
        for i_hat in separating:
            gap = abs(system.slack(i_hat, rho))
            if gap == 0:
                continue
            cand = Brace(i_hat, rho, int(gap))
            if best is None or (cand.gap, cand.i_hat, cand.rho) < (best.gap, best.i_hat, best.rho):
                best = cand
    return best


def clutter_brace_search(
    C: Clutter, F: Face, Fplus: Face, max_gap: int | None = None
) -> Brace | None:
    """被覆系の (F, F⁺) ブレース.

    候補 1: F⁺ \\ F にあるブロッカーの特性ベクトル。
    候補 2: F の整数点 v に e^j を足した点。
    どちらもなければ一般の find_brace に任せる。
    """
    cs = covering_system(C)
    system = cs.system
    if F.system != system or Fplus.system != system:
        raise UsageError("面が被覆系に属していません")
    n = C.ground_size
    chis = [incidence_vector(B, n) for B in blocker(C).members]
    best = _best_brace(system, F, Fplus, (x for x in chis if Fplus.contains(x)))
    if best is None:
        bases = [x for x in chis if F.contains(x)]
        if not bases:
            v = face_lattice_points(F).first()
            bases = [] if v is None else [v]
        shifted = (
            tuple(x + int(k == j) for k, x in enumerate(v))
            for v in bases
            for j in range(n)
        )
        best = _best_brace(system, F, Fplus, shifted)
    if best is None:
        logger.debug("候補 1/2 にブレースなし: find_brace に切り替えます")
        return find_brace(system, F, Fplus, max_gap or max(n, 1))
    if not verify_brace(system, F, Fplus, best):
        raise InternalError(f"クラッターのブレース {best} が条件を満たしません")
    return best


def brace_report(brace: Brace) -> dict[str, Any]:
    return {"i_hat": brace.i_hat + 1, "rho": list(brace.rho), "gap": brace.gap}


def fmt_members(C: Clutter) -> list[list[int]]:
    return [one_based(S) for S in C.members]
