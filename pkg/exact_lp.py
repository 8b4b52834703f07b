"""主問題 (P) max{wᵀx : Mx <= b} と双対 (D) min{bᵀy : Mᵀy = w, y >= 0} の厳密解法.

最適面の抽出、厳密相補的な双対解、双対最適解のアフィン包を提供する。
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Sequence

from errors import AdmissibilityError, InternalError, UsageError
from exact_linalg import Rat, lcm_list
from polyhedron import AffineSubspace, Face, LinearSystem, face_from_tight
from simplex import LpOutcome, LpStatus, feasible_point, in_cone, maximize, minimize

__all__ = [
    "LpOutcome",
    "LpStatus",
    "Weight",
    "dual_affine_hull",
    "dual_optimal_rows",
    "in_cone",
    "is_admissible",
    "maximize",
    "optimal_face",
    "solve",
    "strictly_complementary_dual",
]

logger = logging.getLogger(__name__)

Weight = tuple[Rat, ...]


def as_weight(system: LinearSystem, w: Iterable[Rat | int]) -> Weight:
    out = tuple(Fraction(v) for v in w)
    if len(out) != system.n:
        raise UsageError(f"重み w の長さは {system.n} が必要です (実際は {len(out)})")
    return out


def solve(system: LinearSystem, w: Iterable[Rat | int]) -> LpOutcome:
    """(P:M,b,w) を解く. 最適なら相補的な主双対の組を返す."""
    return maximize(system.M, system.b, as_weight(system, w))


def is_admissible(system: LinearSystem, w: Iterable[Rat | int]) -> bool:
    return solve(system, w).is_optimal


def _solve_admissible(system: LinearSystem, w: Weight) -> LpOutcome:
    out = solve(system, w)
    if not out.is_optimal:
        raise AdmissibilityError(
            f"w = ({', '.join(map(str, w))}) は admissible ではありません ({out.status.value})"
        )
    return out


def optimal_face(system: LinearSystem, w: Iterable[Rat | int]) -> Face:
    """(P:M,b,w) の最適解全体がなす面 F と閉じたタイト集合 I(F)."""
    w = as_weight(system, w)
    out = _solve_admissible(system, w)
    rows, rhs = system.lp_rows()
    rows.append([-v for v in w])
    rhs.append(-out.value)
    tight = []
    for j in range(system.m):
        if system.slack(j, out.primal) != 0:
            continue
        low = minimize(rows, rhs, system.M[j])
        if low.is_optimal and low.value == system.b[j]:
            tight.append(j)
    return face_from_tight(system, tight)


def dual_optimal_rows(
    system: LinearSystem, w: Weight, support: Iterable[int]
) -> tuple[list[list[Rat]], list[Rat]]:
    """{y : Mᵀy = w, y >= 0, y_j = 0 (j ∉ support)} を LP 用の不等式で表す."""
    m, n = system.m, system.n
    support = set(support)
    rows: list[list[Rat]] = []
    rhs: list[Rat] = []
    for k in range(n):
        col = [Fraction(system.M[i][k]) for i in range(m)]
        rows += [col, [-v for v in col]]
        rhs += [w[k], -w[k]]
    for i in range(m):
        e = [Fraction(0)] * m
        e[i] = Fraction(-1)
        rows.append(e)
        rhs.append(Fraction(0))
        if i not in support:
            rows.append([-v for v in e])
            rhs.append(Fraction(0))
    return rows, rhs


def strictly_complementary_dual(
    system: LinearSystem, w: Iterable[Rat | int]
) -> tuple[Rat, ...]:
    """I(F) 上で正、それ以外で 0 の双対最適解 (添字ごとの最大化解の平均)."""
    w = as_weight(system, w)
    F = optimal_face(system, w)
    I = F.indices
    m = system.m
    if not I:
        return tuple(Fraction(0) for _ in range(m))
    rows, rhs = dual_optimal_rows(system, w, I)
    base = feasible_point(rows, rhs, m)
    if base is None:
        raise InternalError("双対最適面が空です")
    total = [Fraction(0)] * m
    for i in I:
        e = [Fraction(0)] * m
        e[i] = Fraction(1)
        out = maximize(rows, rhs, e)
        if out.status is LpStatus.UNBOUNDED:
            # 非有界なら y_i <= base_i + 1 で打ち切る
            out = maximize(rows + [e], rhs + [base[i] + 1], e)
        if not out.is_optimal or out.value <= 0:
            raise InternalError(f"双対最適面で y_{i + 1} > 0 となる解が見つかりません")
        total = [a + b for a, b in zip(total, out.primal)]
    y = tuple(v / len(I) for v in total)
    logger.debug("厳密相補的な双対解 %s", y)
    return y


def dual_affine_hull(system: LinearSystem, w: Iterable[Rat | int]) -> AffineSubspace:
    """双対最適解のアフィン包 {y : Mᵀy = w, y_i = 0 (i ∉ I(F))} (整数化した係数で)."""
    w = as_weight(system, w)
    F = optimal_face(system, w)
    m, n = system.m, system.n
    k = lcm_list(v.denominator for v in w)
    N = [tuple(k * system.M[i][c] for i in range(m)) for c in range(n)]
    f = [int(k * w[c]) for c in range(n)]
    for i in range(m):
        if i not in F.tight_set:
            N.append(tuple(int(i == j) for j in range(m)))
            f.append(0)
    return AffineSubspace(tuple(N), tuple(f), m)
