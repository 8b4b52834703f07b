"""チルト制約・ブレース・レジリエンス.

最適面 F とその down-face F⁺ に対するチルト制約を整数の正規形で作り、
ブレース (gap の小さい整数点) からチルト制約の解を構成する。
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

import config
from errors import InfeasibleSystemError, InternalError, UsageError
from exact_linalg import (
    LSpec,
    Rat,
    Solvability,
    gcd_list,
    integer_parametrization,
    lcm_list,
    nullspace,
    single_eq_solvable_in_L,
)
from exact_lp import optimal_face, solve
from polyhedron import (
    Face,
    LinearSystem,
    face_lattice_points,
    is_down_face,
    is_integral,
    lattice_shift_in,
    minimal_faces,
    shift_in,
)
from simplex import LpStatus, maximize, minimize

logger = logging.getLogger(__name__)


def _dot(a: Sequence[Rat | int], x: Sequence[Rat | int]) -> Rat:
    return sum((Fraction(p) * q for p, q in zip(a, x)), Fraction(0))


# --- チルト制約 ---


@dataclass(frozen=True)
class TiltProvenance:
    w: tuple[Rat, ...]
    face: tuple[int, ...]
    down_face: tuple[int, ...]
    rho: tuple[Rat, ...]
    tau: Rat


@dataclass(frozen=True)
class TiltConstraint:
    """Σ coeff_i u_i = rhs (i ∈ index_set) の正規形. gcd(coeff ∪ {rhs}) = 1, rhs > 0."""

    index_set: tuple[int, ...]
    coeff: tuple[int, ...]
    rhs: int
    provenance: TiltProvenance | None = field(default=None, compare=False)

    def render(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        terms = []
        for i, c in zip(self.index_set, self.coeff):
            if c == 0:
                continue
            name = f"u{i + off}"
            mag = abs(c)
            body = name if mag == 1 else f"{mag} {name}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(f"+ {body}" if c > 0 else f"- {body}")
        return f"{' '.join(terms)} = {self.rhs}"


def _check_pair(system: LinearSystem, F: Face, Fplus: Face) -> None:
    if F.system != system or Fplus.system != system:
        raise UsageError("面が別の系に属しています")
    if F.is_empty:
        raise UsageError("F が空面です")
    if not is_down_face(F, Fplus):
        raise UsageError(
            f"F⁺ = {_fmt(Fplus.indices)} は F = {_fmt(F.indices)} の down-face ではありません"
        )


def _fmt(indices: Iterable[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in indices) + "}"


def _in_aff(F: Face, x: Sequence[Rat | int]) -> bool:
    return F.affine_hull().contains(x)


def _rho_candidates(system: LinearSystem, F: Face, Fplus: Face) -> Iterator[tuple[Rat, ...]]:
    """aff(F⁺) \\ aff(F) の点 (整数点を優先) を生成する."""
    I = Fplus.indices
    rows = [system.M[i] for i in I]
    rhs = [system.b[i] for i in I]
    param = (
        integer_parametrization(rows, rhs)
        if rows
        else (tuple(0 for _ in range(system.n)), [tuple(int(i == j) for i in range(system.n)) for j in range(system.n)])
    )
    if param is not None:
        x0, K = param
        seen = set()
        for radius in itertools.count(0):
            if radius > 2 * config.LATTICE_RADIUS:
                break
            for t in itertools.product(range(-radius, radius + 1), repeat=len(K)):
                if max((abs(v) for v in t), default=0) != radius:
                    continue
                x = tuple(
                    Fraction(x0[k] + sum(tj * Kj[k] for tj, Kj in zip(t, K)))
                    for k in range(system.n)
                )
                if x not in seen and not _in_aff(F, x):
                    seen.add(x)
                    yield x
            if not K:
                break
    # 整数点がない場合は F の点から方向を足す
    base = F.point
    directions = nullspace(rows, system.n)
    Frows = [system.M[i] for i in F.indices]
    for d in directions:
        if any(_dot(r, d) != 0 for r in Frows):
            for k in itertools.count(1):
                yield tuple(b + k * v for b, v in zip(base, d))


def _canonical(alpha: Sequence[Rat]) -> tuple[tuple[int, ...], int]:
    L = lcm_list([a.denominator for a in alpha] + [1])
    coeff = [int(a * L) for a in alpha]
    g = gcd_list(coeff + [L])
    return tuple(c // g for c in coeff), L // g


def tilt_constraint(
    system: LinearSystem,
    w: Iterable[Rat | int],
    F: Face,
    Fplus: Face,
    rho: Sequence[Rat | int] | None = None,
) -> TiltConstraint:
    """(w, F, F⁺) チルト制約の整数正規形.

    Args:
        system: 不等式系.
        w: 重み. F は (P:M,b,w) の最適面そのものでなければならない.
        F: 面.
        Fplus: F の down-face.
        rho: aff(F⁺) \\ aff(F) の点. 省略時は整数点を優先して選ぶ.

    Returns:
        TiltConstraint (index_set = I(F) \\ I(F⁺)).
    """
    _check_pair(system, F, Fplus)
    w = tuple(Fraction(v) for v in w)
    opt = optimal_face(system, w)
    if opt != F:
        raise UsageError(
            f"F = {_fmt(F.indices)} は w の最適面 {_fmt(opt.indices)} と一致しません"
        )
    tau = solve(system, w).value
    if rho is None:
        rho = next(_rho_candidates(system, F, Fplus))
    rho = tuple(Fraction(v) for v in rho)
    if not Fplus.affine_hull().contains(rho) or _in_aff(F, rho):
        raise UsageError("ρ は aff(F⁺) \\ aff(F) の点でなければなりません")
    denom = tau - _dot(w, rho)
    if denom == 0:
        raise InternalError("τ - wᵀρ = 0: w は F の支持超平面を定めていません")
    index_set = tuple(sorted(F.tight_set - Fplus.tight_set))
    alpha = [system.slack(i, rho) / denom for i in index_set]
    coeff, rhs = _canonical(alpha)
    if all(c == 0 for c in coeff):
        raise InternalError("チルト制約の係数がすべて 0 です")
    return TiltConstraint(
        index_set, coeff, rhs, TiltProvenance(w, F.indices, Fplus.indices, rho, tau)
    )


def sample_rhos(
    system: LinearSystem, F: Face, Fplus: Face, count: int
) -> list[tuple[Rat, ...]]:
    """aff(F⁺) \\ aff(F) の相異なる点を count 個."""
    _check_pair(system, F, Fplus)
    return list(itertools.islice(_rho_candidates(system, F, Fplus), count))


def tilt_solvable(t: TiltConstraint, L: LSpec) -> Solvability:
    """チルト制約が L 値の解を持つか (証人 u は index_set 順)."""
    return single_eq_solvable_in_L(t.coeff, t.rhs, L)


def tilt_satisfied(t: TiltConstraint, u: Sequence[Rat | int]) -> bool:
    return _dot(t.coeff, u) == t.rhs


def perturbed_weight(
    system: LinearSystem, t: TiltConstraint, u: Sequence[Rat | int]
) -> tuple[tuple[Rat, ...], Rat]:
    """w̄ = w - Σ u_i row_i, τ̄ = τ - Σ u_i b_i (i ∈ index_set)."""
    if t.provenance is None:
        raise UsageError("provenance のないチルト制約です")
    w = list(t.provenance.w)
    tau = t.provenance.tau
    for i, ui in zip(t.index_set, u):
        ui = Fraction(ui)
        w = [wk - ui * a for wk, a in zip(w, system.M[i])]
        tau -= ui * system.b[i]
    return tuple(w), tau


# --- ブレース ---


@dataclass(frozen=True)
class Brace:
    """(F, F⁺) ブレース. gap = |b_î - row_î ρ| > 0."""

    i_hat: int
    rho: tuple[int, ...]
    gap: int


def verify_brace(system: LinearSystem, F: Face, Fplus: Face, brace: Brace) -> bool:
    """b1 (ρ 整数, ρ ∈ aff(F⁺) \\ aff(F)), b2 (î ∈ I(F) \\ I(F⁺)), b3 (gap) を確認する."""
    rho = brace.rho
    if any(Fraction(v).denominator != 1 for v in rho):
        return False
    if not Fplus.affine_hull().contains(rho) or _in_aff(F, rho):
        return False
    if brace.i_hat not in F.tight_set - Fplus.tight_set:
        return False
    gap = abs(system.slack(brace.i_hat, rho))
    return gap > 0 and gap == brace.gap


def _search_radius(system: LinearSystem, max_gap: int) -> int:
    coords = [
        abs(v)
        for F in minimal_faces(system)
        if F.point is not None
        for v in F.point
    ]
    top = max(coords, default=Fraction(0))
    return max(config.LATTICE_RADIUS, int(top) + 1 + max_gap)


def _integer_point_at(
    Fplus: Face, i_hat: int, level: Rat, radius: int
) -> tuple[int, ...] | None:
    if Fraction(level).denominator != 1:
        return None
    row = Fplus.system.M[i_hat]
    search = face_lattice_points(Fplus, [(row, int(level))], radius)
    return search.first()


def find_brace(
    system: LinearSystem,
    F: Face,
    Fplus: Face,
    max_gap: int,
    shift_search: bool = True,
) -> Brace | None:
    """gap が max_gap 以下の (F, F⁺) ブレースを探す.

    各 î について κ = sup{b_î - row_î x : x ∈ F⁺} を LP で求め、κ <= max_gap なら
    最大化部分面の整数点を、さらに s <= max_gap の格子超平面 {row_î x = b_î - s} 上の
    整数点を探す。gap 最小 (同点は î 最小) のものを返す。
    shift_search=False では κ の経路だけを使う (診断用)。
    """
    _check_pair(system, F, Fplus)
    if max_gap < 1:
        raise UsageError("max_gap は 1 以上が必要です")
    radius = _search_radius(system, max_gap)
    rows, rhs = system.lp_rows(Fplus.tight_set)
    best: Brace | None = None
    for i_hat in sorted(F.tight_set - Fplus.tight_set):
        b_i = system.b[i_hat]
        low = minimize(rows, rhs, system.M[i_hat])
        kappa = None if low.status is LpStatus.UNBOUNDED else b_i - low.value
        found: Brace | None = None
        if shift_search:
            top = max_gap if kappa is None else min(max_gap, int(kappa))
            # row_î x が gcd の倍数になる格子超平面だけを見る
            first = b_i - lattice_shift_in(system, i_hat).b[i_hat]
            step = gcd_list(system.M[i_hat])
            for s in range(first, top + 1, step):
                if kappa is not None and s == kappa:
                    break  # κ 経路で扱う
                x = _integer_point_at(Fplus, i_hat, b_i - s, radius)
                if x is not None:
                    found = Brace(i_hat, x, s)
                    break
        if found is None and kappa is not None and kappa <= max_gap:
            x = _integer_point_at(Fplus, i_hat, b_i - kappa, radius)
            if x is not None:
                found = Brace(i_hat, x, int(kappa))
        if found is not None and (best is None or found.gap < best.gap):
            best = found
    if best is not None and not verify_brace(system, F, Fplus, best):
        raise InternalError(f"見つかったブレース {best} が条件を満たしません")
    logger.debug("ブレース %s (F=%s, F⁺=%s)", best, F.indices, Fplus.indices)
    return best


def brace_to_tilt_solution(
    system: LinearSystem,
    w: Iterable[Rat | int],
    F: Face,
    Fplus: Face,
    brace: Brace,
) -> tuple[Rat, ...]:
    """ブレースからチルト制約の解 u を作る (index_set 順, u_î 以外は 0).

    u_î = (τ - wᵀρ) / (b_î - row_î ρ).
    """
    _check_pair(system, F, Fplus)
    w = tuple(Fraction(v) for v in w)
    if optimal_face(system, w) != F:
        raise UsageError("F は w の最適面ではありません")
    if not verify_brace(system, F, Fplus, brace):
        raise UsageError(f"{brace} は (F, F⁺) ブレースではありません")
    if not is_integral(system).holds:
        raise UsageError("多面体が整数的ではありません")
    tau = solve(system, w).value
    u_hat = (tau - _dot(w, brace.rho)) / system.slack(brace.i_hat, brace.rho)
    index_set = sorted(F.tight_set - Fplus.tight_set)
    return tuple(u_hat if i == brace.i_hat else Fraction(0) for i in index_set)


# --- レジリエンス ---


@dataclass(frozen=True)
class ResiliencyProfile:
    """各行の最小シフト量 s(i) とレジリエンス各種の判定."""

    p: int
    integral: bool
    shifts: tuple[int | None, ...]
    vacuous_rows: tuple[int, ...] = ()  # シフト後の系が空で空虚に整数的とした行
    fractional_points: dict[int, tuple[Rat, ...]] = field(default_factory=dict, compare=False)

    @property
    def resilient(self) -> bool:
        return self.integral and all(s == 1 for s in self.shifts)

    @property
    def half_resilient(self) -> bool:
        return self.integral and all(s is not None and s <= 2 for s in self.shifts)

    @property
    def p_resilient(self) -> bool:
        return self.integral and all(s is not None and s <= self.p for s in self.shifts)

    def failing_rows(self, p: int | None = None) -> tuple[int, ...]:
        limit = self.p if p is None else p
        return tuple(i for i, s in enumerate(self.shifts) if s is None or s > limit)


class _ShiftCheck(NamedTuple):
    integral: bool
    vacuous: bool
    witness: tuple[Rat, ...] | None


def _shift_integral(system: LinearSystem, i: int, s: int) -> _ShiftCheck:
    shifted = shift_in(system, i, s)
    try:
        res = is_integral(shifted)
    except InfeasibleSystemError:
        return _ShiftCheck(True, True, None)
    return _ShiftCheck(res.holds, False, None if res.holds else res.witness.point)


def resiliency_profile(system: LinearSystem, p: int) -> ResiliencyProfile:
    """1/p レジリエンスの判定. 各行 i で s ∈ [max(p, 2)] の最小のものを探す."""
    if p < 1:
        raise UsageError("p は正の整数が必要です")
    try:
        integral = is_integral(system).holds
    except InfeasibleSystemError:
        integral = True
    if not integral:
        return ResiliencyProfile(p, False, tuple(None for _ in range(system.m)))
    shifts: list[int | None] = []
    vacuous: list[int] = []
    fractional: dict[int, tuple[Rat, ...]] = {}
    for i in range(system.m):
        chosen = None
        for s in range(1, max(p, 2) + 1):
            check = _shift_integral(system, i, s)
            if s == 1 and not check.integral and check.witness is not None:
                fractional[i] = check.witness
            if check.integral:
                chosen = s
                if check.vacuous:
                    vacuous.append(i)
                break
        shifts.append(chosen)
    logger.debug("レジリエンス: shifts=%s vacuous=%s", shifts, vacuous)
    return ResiliencyProfile(p, True, tuple(shifts), tuple(vacuous), fractional)


class PSmallResult(NamedTuple):
    holds: bool
    reason: str = ""
    max_slack: Rat | None = None


def is_p_small(system: LinearSystem, p: int) -> PSmallResult:
    """整数的な多面体で、すべての頂点・行のスラックが p 以下か."""
    n = system.n
    for k in range(n):
        for sign in (1, -1):
            e = [0] * n
            e[k] = sign
            out = maximize(system.M, system.b, e)
            if out.status is LpStatus.INFEASIBLE:
                return PSmallResult(False, "空の多面体")
            if out.status is LpStatus.UNBOUNDED:
                return PSmallResult(False, "ポリトープではありません (非有界)")
    if not is_integral(system).holds:
        return PSmallResult(False, "整数的ではありません")
    slack = max(
        system.slack(i, F.point) for F in minimal_faces(system) for i in range(system.m)
    )
    if slack > p:
        return PSmallResult(False, f"スラック行列の最大成分 {slack} > {p}", slack)
    return PSmallResult(True, "", slack)
