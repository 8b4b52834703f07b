"""多面体 {x : Mx <= b} の面構造.

面は閉じたタイト集合 I(F) で一意に表す。陰的等式・アフィン包・面束・極小面・
整数性・後退錐・縮退判定・faceted 判定と、レジリエンス用のシフト操作を提供する。
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

import config
from errors import InfeasibleSystemError, ResourceLimitError, UsageError
from exact_linalg import (
    Rat,
    as_intvec,
    canonical_line,
    clear_denominators,
    gcd_list,
    integer_parametrization,
    nullspace,
    primitive,
    rank,
    solve_integer,
    solve_rational,
)
from simplex import LpStatus, feasible_point, maximize, minimize

logger = logging.getLogger(__name__)


# --- 型 ---


@dataclass(frozen=True)
class LinearSystem:
    """整数係数の不等式系 Mx <= b (m >= 1, n >= 1)."""

    M: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        M = tuple(tuple(as_intvec(row)) for row in self.M)
        b = tuple(as_intvec(self.b))
        if not M or not M[0]:
            raise UsageError("M は 1 行 1 列以上が必要です")
        if any(len(row) != len(M[0]) for row in M):
            raise UsageError("M の行の長さが揃っていません")
        if len(b) != len(M):
            raise UsageError(f"M は {len(M)} 行ですが b の長さは {len(b)} です")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, M: Iterable[Iterable[int]], b: Iterable[int]) -> LinearSystem:
        return cls(tuple(tuple(r) for r in M), tuple(b))

    @property
    def m(self) -> int:
        return len(self.M)

    @property
    def n(self) -> int:
        return len(self.M[0])

    def row(self, i: int) -> tuple[int, ...]:
        return self.M[i]

    def slack(self, i: int, x: Sequence[Rat | int]) -> Rat:
        return self.b[i] - sum((Fraction(a) * v for a, v in zip(self.M[i], x)), Fraction(0))

    def contains(self, x: Sequence[Rat | int]) -> bool:
        return all(self.slack(i, x) >= 0 for i in range(self.m))

    def check_index(self, i: int) -> None:
        if not 0 <= i < self.m:
            raise UsageError(f"行番号 {i + 1} は範囲外です (1..{self.m})")

    def lp_rows(
        self, equalities: Iterable[int] = ()
    ) -> tuple[list[list[int]], list[int]]:
        """Mx <= b に row_i x >= b_i (i ∈ equalities) を加えた LP 用の行."""
        rows = [list(r) for r in self.M]
        rhs = list(self.b)
        for i in sorted(set(equalities)):
            rows.append([-a for a in self.M[i]])
            rhs.append(-self.b[i])
        return rows, rhs


@dataclass(frozen=True)
class AffineSubspace:
    """{x : Nx = f}. N が 0 行なら全空間."""

    N: tuple[tuple[int, ...], ...]
    f: tuple[int, ...]
    n: int

    def point(self) -> tuple[Rat, ...] | None:
        return solve_rational(self.N, self.f, self.n)

    @property
    def is_empty(self) -> bool:
        return self.point() is None

    def integer_point(self) -> tuple[int, ...] | None:
        if not self.N:
            return tuple(0 for _ in range(self.n))
        return solve_integer(self.N, self.f)

    def directions(self) -> list[tuple[Rat, ...]]:
        return nullspace(self.N, self.n)

    @property
    def dim(self) -> int:
        return -1 if self.is_empty else self.n - rank(self.N)

    def contains(self, x: Sequence[Rat | int]) -> bool:
        return all(
            sum((Fraction(a) * v for a, v in zip(row, x)), Fraction(0)) == fi
            for row, fi in zip(self.N, self.f)
        )

    def equivalent(self, other: AffineSubspace) -> bool:
        """点集合として等しいか."""
        if self.n != other.n:
            return False
        p, q = self.point(), other.point()
        if p is None or q is None:
            return p is None and q is None
        r1, r2 = rank(self.N), rank(other.N)
        return (
            r1 == r2
            and rank(list(self.N) + list(other.N)) == r1
            and other.contains(p)
        )


@dataclass(frozen=True)
class Face:
    """Mx <= b の面. tight_set は閉じている (I(F) そのもの). dim = -1 は空面."""

    system: LinearSystem
    tight_set: frozenset[int]
    dim: int
    point: tuple[Rat, ...] | None = field(default=None, compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return self.dim < 0

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.tight_set))

    def as_system(self) -> LinearSystem:
        """F を表す不等式系 (タイト行を逆向きにも加える)."""
        rows, rhs = self.system.lp_rows(self.tight_set)
        return LinearSystem.of(rows, rhs)

    def affine_hull(self) -> AffineSubspace:
        I = self.indices
        return AffineSubspace(
            tuple(self.system.M[i] for i in I),
            tuple(self.system.b[i] for i in I),
            self.system.n,
        )

    def contains(self, x: Sequence[Rat | int]) -> bool:
        return self.system.contains(x) and all(
            self.system.slack(i, x) == 0 for i in self.tight_set
        )

    def sort_key(self) -> tuple:
        return (-self.dim, self.indices)


# --- タイト集合の閉包 ---


@lru_cache(maxsize=4096)
def _closure(system: LinearSystem, I: frozenset[int]) -> Face:
    rows, rhs = system.lp_rows(I)
    x = feasible_point(rows, rhs, system.n)
    if x is None:
        return Face(system, frozenset(range(system.m)), -1)
    tight = set(I)
    loose = {j for j in range(system.m) if system.slack(j, x) > 0}
    for j in range(system.m):
        if j in tight or j in loose:
            continue
        out = minimize(rows, rhs, system.M[j])
        if out.is_optimal and out.value == system.b[j]:
            tight.add(j)
            continue
        loose.add(j)
        if out.is_optimal:
            loose.update(k for k in range(system.m) if system.slack(k, out.primal) > 0)
    dim = system.n - rank([system.M[i] for i in tight]) if tight else system.n
    return Face(system, frozenset(tight), dim, x)


def face_from_tight(system: LinearSystem, I: Iterable[int]) -> Face:
    """I を閉包して面 F = Q ∩ {row_i x = b_i, i ∈ I} を返す (空面もあり得る)."""
    I = frozenset(I)
    for i in I:
        system.check_index(i)
    return _closure(system, I)


def _require_feasible(system: LinearSystem) -> Face:
    Q = _closure(system, frozenset())
    if Q.is_empty:
        raise InfeasibleSystemError("多面体 {x : Mx <= b} が空です")
    return Q


def implicit_equalities(system: LinearSystem) -> frozenset[int]:
    """Q 全体でタイトな制約の添字集合."""
    return _require_feasible(system).tight_set


def affine_hull(system: LinearSystem) -> AffineSubspace:
    """aff(Q) = {x : M⁼x = b⁼}."""
    return _require_feasible(system).affine_hull()


# --- 面束 ---


@lru_cache(maxsize=256)
def _face_lattice(system: LinearSystem) -> tuple[Face, ...]:
    if system.m > config.FACE_ROW_CAP:
        raise ResourceLimitError("DUALCERT_FACE_ROW_CAP", system.m, config.FACE_ROW_CAP)
    Q = _closure(system, frozenset())
    if Q.is_empty:
        return ()
    seen = {Q.tight_set: Q}
    queue = [Q]
    while queue:
        F = queue.pop()
        for i in range(system.m):
            if i in F.tight_set:
                continue
            G = _closure(system, F.tight_set | {i})
            if not G.is_empty and G.tight_set not in seen:
                seen[G.tight_set] = G
                queue.append(G)
    logger.debug("面束: %d 個の非空面", len(seen))
    return tuple(sorted(seen.values(), key=Face.sort_key))


def enumerate_faces(system: LinearSystem) -> tuple[Face, ...]:
    """非空な面をすべて (各 1 回) 返す. 次元の降順."""
    return _face_lattice(system)


def down_faces(F: Face) -> tuple[Face, ...]:
    """F ⊂ F⁺ かつ dim F⁺ = dim F + 1 を満たす面 F⁺."""
    return tuple(
        G
        for G in _face_lattice(F.system)
        if G.dim == F.dim + 1 and G.tight_set < F.tight_set
    )


def is_down_face(F: Face, Fplus: Face) -> bool:
    return (
        Fplus.system == F.system
        and not Fplus.is_empty
        and Fplus.dim == F.dim + 1
        and Fplus.tight_set < F.tight_set
    )


# --- 極小面と整数性 ---


@lru_cache(maxsize=256)
def minimal_faces(system: LinearSystem) -> tuple[Face, ...]:
    """極小面 (x + 直線空間) を基底列挙で求める."""
    _require_feasible(system)
    m, n = system.m, system.n
    r = rank(system.M)
    faces: dict[frozenset[int], Face] = {}
    if r == 0:
        tight = frozenset(i for i in range(m) if system.b[i] == 0)
        x = tuple(Fraction(0) for _ in range(n))
        return (Face(system, tight, n, x),)
    count = math.comb(m, r)
    if count > config.BASIS_CAP:
        raise ResourceLimitError("DUALCERT_BASIS_CAP", count, config.BASIS_CAP)
    for B in itertools.combinations(range(m), r):
        rows = [system.M[i] for i in B]
        if rank(rows) < r:
            continue
        x = solve_rational(rows, [system.b[i] for i in B], n)
        if x is None or not system.contains(x):
            continue
        tight = frozenset(i for i in range(m) if system.slack(i, x) == 0)
        if tight not in faces:
            faces[tight] = Face(system, tight, n - r, x)
    return tuple(sorted(faces.values(), key=Face.sort_key))


class IntegralityResult(NamedTuple):
    holds: bool
    witness: Face | None = None  # 整数点を持たない極小面


def is_integral(system: LinearSystem) -> IntegralityResult:
    """すべての極小面が整数点を含むか."""
    for F in minimal_faces(system):
        I = F.indices
        if not I:
            continue
        if solve_integer([system.M[i] for i in I], [system.b[i] for i in I]) is None:
            return IntegralityResult(False, F)
    return IntegralityResult(True)


# --- 後退錐 ---


def _integer_direction(v: Sequence[Rat]) -> tuple[int, ...]:
    return primitive(clear_denominators(v)[0])


def lineality_basis(system: LinearSystem) -> list[tuple[int, ...]]:
    """直線空間 ker M の整数基底 (各ベクトルは最初の非零成分が正)."""
    return [canonical_line(_integer_direction(d)) for d in nullspace(system.M, system.n)]


def recession_generators(system: LinearSystem) -> tuple[tuple[int, ...], ...]:
    """後退錐 {x : Mx <= 0} の生成元 (primitive な端線と直線空間の ± 基底)."""
    n = system.n
    lineal = lineality_basis(system)
    rows = [list(r) for r in system.M]
    eq_rows = [list(v) for v in lineal]
    pool = rows + eq_rows
    rays: set[tuple[int, ...]] = set()
    for B in itertools.combinations(range(len(pool)), n - 1):
        sub = [pool[i] for i in B]
        ker = nullspace(sub, n) if sub else nullspace([], n)
        if len(ker) != 1:
            continue
        d = _integer_direction(ker[0])
        for cand in (d, tuple(-x for x in d)):
            if all(sum(a * x for a, x in zip(r, cand)) <= 0 for r in rows) and all(
                sum(a * x for a, x in zip(r, cand)) == 0 for r in eq_rows
            ):
                rays.add(cand)
    out = sorted(rays) + sorted(set(lineal) | {tuple(-x for x in v) for v in lineal})
    return tuple(out)


# --- 縮退・faceted ---


class NonDegeneracyResult(NamedTuple):
    holds: bool
    witness: Face | None = None  # タイト行が一次従属な極小面
    scaled_pair_collapsed: bool = False  # 倍率の異なる逆向き対をまとめた


def is_non_degenerate(system: LinearSystem) -> NonDegeneracyResult:
    """各極小面のタイト行が (逆向き対を 1 本にまとめて) 一次独立か."""
    scaled = False
    for F in minimal_faces(system):
        kept: list[tuple[int, ...]] = []
        kept_rows: list[tuple[int, ...]] = []
        for i in F.indices:
            row = system.M[i]
            p = primitive(row)
            neg = tuple(-x for x in p)
            if neg in kept and any(x != 0 for x in p):
                j = kept.index(neg)
                if tuple(-x for x in kept_rows[j]) != row:
                    scaled = True
                continue
            kept.append(p)
            kept_rows.append(row)
        if rank(kept_rows) < len(kept_rows):
            return NonDegeneracyResult(False, F, scaled)
    return NonDegeneracyResult(True, None, scaled)


class FacetedResult(NamedTuple):
    holds: bool
    failed: tuple[str, ...] = ()  # "i" / "ii" / "iii"
    redundant_rows: tuple[int, ...] = ()
    non_primitive_rows: tuple[int, ...] = ()
    implicit_rows: tuple[int, ...] = ()


def is_faceted(system: LinearSystem) -> FacetedResult:
    """(i) 冗長な制約がない (ii) 各行の gcd が 1 (iii) 全次元 を調べる."""
    implicit = implicit_equalities(system)
    redundant = []
    for i in range(system.m):
        others = [j for j in range(system.m) if j != i]
        out = maximize(
            [system.M[j] for j in others], [system.b[j] for j in others], system.M[i]
        )
        if out.is_optimal and out.value <= system.b[i]:
            redundant.append(i)
    non_primitive = [
        i for i in range(system.m) if gcd_list(system.M[i] + (system.b[i],)) != 1
    ]
    failed = tuple(
        tag
        for tag, bad in (("i", redundant), ("ii", non_primitive), ("iii", implicit))
        if bad
    )
    return FacetedResult(
        not failed, failed, tuple(redundant), tuple(non_primitive), tuple(sorted(implicit))
    )


# --- シフト ---


def shift_in(system: LinearSystem, i: int, s: int) -> LinearSystem:
    """b_i を b_i - s に置き換えた系 (s >= 1)."""
    system.check_index(i)
    if s <= 0:
        raise UsageError(f"シフト量は正の整数が必要です: {s}")
    b = list(system.b)
    b[i] -= s
    return LinearSystem(system.M, tuple(b))


def lattice_shift_in(system: LinearSystem, i: int) -> LinearSystem:
    """行 i の超平面を次の格子超平面まで内側へ動かす."""
    system.check_index(i)
    g = gcd_list(system.M[i])
    if g == 0:
        raise UsageError(f"行 {i + 1} は零ベクトルです")
    bi = system.b[i]
    target = bi - g if bi % g == 0 else g * (bi // g)
    return shift_in(system, i, bi - target)


# --- 格子点の列挙 ---


@dataclass
class LatticeSearch:
    """{x ∈ Z^n : Ex = f, Gx <= h} の格子点を有界な範囲で列挙する.

    非有界な方向は半径 radius の箱で打ち切り、exhaustive を False にする。
    """

    x0: tuple[int, ...] | None
    K: list[tuple[int, ...]]
    ranges: list[tuple[int, int]]
    G: list[list[Rat | int]]
    h: list[Rat | int]
    exhaustive: bool = True

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        if self.x0 is None:
            return
        for t in itertools.product(*(range(lo, hi + 1) for lo, hi in self.ranges)):
            x = tuple(
                self.x0[k] + sum(tj * Kj[k] for tj, Kj in zip(t, self.K))
                for k in range(len(self.x0))
            )
            if all(
                sum((Fraction(a) * v for a, v in zip(row, x)), Fraction(0)) <= hk
                for row, hk in zip(self.G, self.h)
            ):
                yield x

    def first(self) -> tuple[int, ...] | None:
        return next(iter(self), None)


def _t_bounds(
    rows: list[list[Rat]], rhs: list[Rat], k: int
) -> list[tuple[Rat, Rat] | None] | None:
    """各 t_j の LP 上下限. 実行不能なら None, 非有界な座標は None."""
    if feasible_point(rows, rhs, k) is None:
        return None
    out: list[tuple[Rat, Rat] | None] = []
    for j in range(k):
        e = [0] * k
        e[j] = 1
        hi = maximize(rows, rhs, e)
        lo = minimize(rows, rhs, e)
        if hi.status is LpStatus.OPTIMAL and lo.status is LpStatus.OPTIMAL:
            out.append((lo.value, hi.value))
        else:
            out.append(None)
    return out


def lattice_points(
    eq_rows: Sequence[Sequence[int]],
    eq_rhs: Sequence[int],
    ineq_rows: Sequence[Sequence[Rat | int]],
    ineq_rhs: Sequence[Rat | int],
    n: int,
    radius: int | None = None,
) -> LatticeSearch:
    """整数点探索の準備: Smith 形でパラメータ化し、LP で t の範囲を求める."""
    radius = config.LATTICE_RADIUS if radius is None else radius
    if eq_rows:
        param = integer_parametrization(eq_rows, eq_rhs)
    else:
        param = (
            tuple(0 for _ in range(n)),
            [tuple(int(i == j) for i in range(n)) for j in range(n)],
        )
    G = [list(r) for r in ineq_rows]
    h = list(ineq_rhs)
    if param is None:
        return LatticeSearch(None, [], [], G, h)
    x0, K = param
    k = len(K)

    def t_system(extra_box: bool) -> tuple[list[list[Rat]], list[Rat]]:
        rows, rhs = [], []
        for row, hk in zip(G, h):
            rows.append([Fraction(sum(a * Kj[c] for c, a in enumerate(row))) for Kj in K])
            rhs.append(Fraction(hk) - sum(Fraction(a) * x0[c] for c, a in enumerate(row)))
        if extra_box:
            for c in range(n):
                coeffs = [Fraction(Kj[c]) for Kj in K]
                rows += [coeffs, [-v for v in coeffs]]
                rhs += [Fraction(radius - x0[c]), Fraction(radius + x0[c])]
        return rows, rhs

    if k == 0:
        return LatticeSearch(x0, K, [], G, h)
    rows, rhs = t_system(False)
    bounds = _t_bounds(rows, rhs, k)
    if bounds is None:
        return LatticeSearch(None, [], [], G, h)
    exhaustive = all(b is not None for b in bounds)
    if not exhaustive:
        rows, rhs = t_system(True)
        bounds = _t_bounds(rows, rhs, k)
        if bounds is None:
            return LatticeSearch(None, [], [], G, h, exhaustive=False)
    ranges = [(math.ceil(lo), math.floor(hi)) for lo, hi in bounds]
    size = 1
    for lo, hi in ranges:
        size *= max(0, hi - lo + 1)
    if size > config.LATTICE_CAP:
        raise ResourceLimitError("DUALCERT_LATTICE_CAP", size, config.LATTICE_CAP)
    return LatticeSearch(x0, K, ranges, G, h, exhaustive)


def face_lattice_points(
    F: Face,
    extra_eq: Sequence[tuple[Sequence[int], int]] = (),
    radius: int | None = None,
) -> LatticeSearch:
    """面 F (に等式を追加したもの) の整数点."""
    system = F.system
    eq_rows = [list(system.M[i]) for i in F.indices]
    eq_rhs = [system.b[i] for i in F.indices]
    for row, val in extra_eq:
        eq_rows.append(list(row))
        eq_rhs.append(val)
    return lattice_points(eq_rows, eq_rhs, system.M, system.b, system.n, radius)
