"""有理数上の厳密な二段階単体法 (Bland 規則).

max{c·x : Ax <= b} (x は自由変数) を Fraction で解き、
最適時には相補的な主双対の組を返す。
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from errors import InternalError, UsageError

logger = logging.getLogger(__name__)

Rat = Fraction


class LpStatus(enum.Enum):
    """LP の終了状態."""

    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpOutcome:
    """LP の結果. OPTIMAL のときは c·primal = b·dual = value が厳密に成り立つ."""

    status: LpStatus
    value: Rat | None = None
    primal: tuple[Rat, ...] | None = None
    dual: tuple[Rat, ...] | None = None
    ray: tuple[Rat, ...] | None = None  # UNBOUNDED 時の改善方向 (診断用)

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """標準形 [A | -A | I | art] z = b, z >= 0 の単体表."""

    def __init__(
        self, rows: list[list[Rat]], rhs: list[Rat], n: int
    ) -> None:
        m = len(rows)
        self.m = m
        self.n = n
        self.art_start = 2 * n + m
        self.T: list[list[Rat]] = []
        self.basis: list[int] = []
        flipped = [i for i in range(m) if rhs[i] < 0]
        width = self.art_start + len(flipped)
        art = {i: self.art_start + k for k, i in enumerate(flipped)}
        for i in range(m):
            sign = -1 if i in art else 1
            row = [Fraction(0)] * (width + 1)
            for j in range(n):
                row[j] = sign * rows[i][j]
                row[n + j] = -sign * rows[i][j]
            row[2 * n + i] = Fraction(sign)
            if i in art:
                row[art[i]] = Fraction(1)
                self.basis.append(art[i])
            else:
                self.basis.append(2 * n + i)
            row[-1] = sign * rhs[i]
            self.T.append(row)
        self.width = width
        self.pivots = 0
        self.pivot_cap = 2 ** (m + n) + 64

    # --- 基本操作 ---

    def pivot(self, r: int, j: int) -> None:
        self.pivots += 1
        if self.pivots > self.pivot_cap:
            raise InternalError("単体法のピボット回数が理論上限を超えました (循環?)")
        T = self.T
        piv = T[r][j]
        T[r] = [v / piv for v in T[r]]
        for k in range(self.m):
            f = T[k][j]
            if k != r and f != 0:
                rowr = T[r]
                T[k] = [a - f * c for a, c in zip(T[k], rowr)]
        self.basis[r] = j

    def reduced_costs(self, cost: list[Rat], columns: range) -> dict[int, Rat]:
        cb = [cost[v] for v in self.basis]
        return {
            j: cost[j] - sum(c * self.T[i][j] for i, c in enumerate(cb) if c != 0)
            for j in columns
        }

    def run(self, cost: list[Rat], columns: range) -> int | None:
        """Bland 規則で最適化する. 非有界なら入る列番号を返す."""
        while True:
            rc = self.reduced_costs(cost, columns)
            entering = next(
                (j for j in columns if rc[j] > 0 and j not in self.basis), None
            )
            if entering is None:
                return None
            candidates = [
                (self.T[i][-1] / self.T[i][entering], self.basis[i], i)
                for i in range(self.m)
                if self.T[i][entering] > 0
            ]
            if not candidates:
                return entering
            _, _, r = min(candidates)
            self.pivot(r, entering)

    def value_of(self, cost: list[Rat]) -> Rat:
        return sum(
            (cost[v] * self.T[i][-1] for i, v in enumerate(self.basis)),
            Fraction(0),
        )

    def point(self) -> list[Rat]:
        z = [Fraction(0)] * self.width
        for i, v in enumerate(self.basis):
            z[v] = self.T[i][-1]
        return z


# --- Public API ---


def maximize(
    rows: Sequence[Sequence[int | Rat]],
    rhs: Sequence[int | Rat],
    objective: Sequence[int | Rat],
) -> LpOutcome:
    """max{objective·x : rows·x <= rhs} を厳密に解く.

    Args:
        rows: 制約行列 (m 行 n 列).
        rhs: 右辺 (長さ m).
        objective: 目的関数 (長さ n).

    Returns:
        LpOutcome. OPTIMAL なら dual は y >= 0, rowsᵀy = objective を満たす。
    """
    n = len(objective)
    A = [[Fraction(v) for v in row] for row in rows]
    b = [Fraction(v) for v in rhs]
    c = [Fraction(v) for v in objective]
    if len(A) != len(b) or any(len(row) != n for row in A):
        raise UsageError("LP の次元が一致しません")
    m = len(A)
    if m == 0:
        if any(c):
            return LpOutcome(LpStatus.UNBOUNDED, ray=tuple(c))
        zero = tuple(Fraction(0) for _ in range(n))
        return LpOutcome(LpStatus.OPTIMAL, Fraction(0), zero, ())

    tab = _Tableau(A, b, n)

    # --- Phase 1: 人工変数の和を最小化 ---
    if tab.width > tab.art_start:
        cost1 = [Fraction(0)] * tab.width
        for j in range(tab.art_start, tab.width):
            cost1[j] = Fraction(-1)
        tab.run(cost1, range(tab.width))
        if tab.value_of(cost1) < 0:
            logger.debug("LP 実行不能 (%d 行, %d ピボット)", m, tab.pivots)
            return LpOutcome(LpStatus.INFEASIBLE)
        # 値 0 で基底に残った人工変数を追い出す
        for i in range(m):
            if tab.basis[i] >= tab.art_start:
                j = next(
                    (j for j in range(tab.art_start) if tab.T[i][j] != 0), None
                )
                if j is None:
                    raise InternalError("行フルランクの標準形で退化行が残りました")
                tab.pivot(i, j)

    # --- Phase 2 ---
    cost2 = [Fraction(0)] * tab.width
    for j in range(n):
        cost2[j] = c[j]
        cost2[n + j] = -c[j]
    columns = range(tab.art_start)
    entering = tab.run(cost2, columns)
    if entering is not None:
        d = [Fraction(0)] * tab.width
        d[entering] = Fraction(1)
        for i, v in enumerate(tab.basis):
            d[v] = -tab.T[i][entering]
        ray = tuple(d[j] - d[n + j] for j in range(n))
        return LpOutcome(LpStatus.UNBOUNDED, ray=ray)

    z = tab.point()
    x = tuple(z[j] - z[n + j] for j in range(n))
    rc = tab.reduced_costs(cost2, range(2 * n, 2 * n + m))
    y = tuple(-rc[2 * n + i] for i in range(m))
    value = tab.value_of(cost2)
    logger.debug("LP 最適値 %s (%d 行, %d ピボット)", value, m, tab.pivots)
    return LpOutcome(LpStatus.OPTIMAL, value, x, y)


def minimize(
    rows: Sequence[Sequence[int | Rat]],
    rhs: Sequence[int | Rat],
    objective: Sequence[int | Rat],
) -> LpOutcome:
    """min{objective·x : rows·x <= rhs}. value は最小値、dual は -objective に対するもの."""
    out = maximize(rows, rhs, [-Fraction(v) for v in objective])
    if not out.is_optimal:
        return out
    return LpOutcome(out.status, -out.value, out.primal, out.dual)


def feasible_point(
    rows: Sequence[Sequence[int | Rat]],
    rhs: Sequence[int | Rat],
    n: int,
) -> tuple[Rat, ...] | None:
    """rows·x <= rhs を満たす点を一つ返す (なければ None)."""
    out = maximize(rows, rhs, [0] * n)
    return out.primal if out.is_optimal else None


def in_cone(
    generators: Sequence[Sequence[int | Rat]], w: Sequence[int | Rat]
) -> bool:
    """w が generators の錐 (非負結合) に含まれるか."""
    k = len(generators)
    if k == 0:
        return all(Fraction(x) == 0 for x in w)
    n = len(w)
    rows = [[generators[j][i] for j in range(k)] for i in range(n)]
    rows += [[-generators[j][i] for j in range(k)] for i in range(n)]
    rhs = [Fraction(x) for x in w] + [-Fraction(x) for x in w]
    for j in range(k):
        e = [0] * k
        e[j] = -1
        rows.append(e)
        rhs.append(0)
    return feasible_point(rows, rhs, k) is not None
