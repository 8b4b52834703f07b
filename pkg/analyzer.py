"""双対整数性の判定: TDI / near-TDI / TDD / TD in L.

定理に基づく証明 (Certified) と、重みの箱を走査した反例 (Refuted) を区別する。
走査で反例が見つからないことは決して証明として扱わない (Undecided)。
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import config
from errors import InternalError, UsageError
from exact_linalg import (
    GscResult,
    LSpec,
    Rat,
    clear_denominators,
    is_L_GSC,
    is_Z_GSC,
    nullspace,
    primitive,
    solve_in_L,
    solve_rational,
)
from exact_lp import (
    as_weight,
    dual_affine_hull,
    is_admissible,
    optimal_face,
    strictly_complementary_dual,
)
from polyhedron import (
    Face,
    LinearSystem,
    down_faces,
    enumerate_faces,
    implicit_equalities,
    is_integral,
    is_non_degenerate,
    lattice_points,
)
from tilt_brace import (
    TiltConstraint,
    is_p_small,
    resiliency_profile,
    tilt_constraint,
    tilt_solvable,
)

logger = logging.getLogger(__name__)


class Status(enum.Enum):
    """判定の状態."""

    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    UNDECIDED = "Undecided"


# 定理の識別子 (レポートに引用される)
THEOREM_NONDEGENERATE_TDI = "nondegenerate-tdi-characterization"
THEOREM_RESILIENCY = "resiliency-sufficiency"
THEOREM_P_SMALL = "p-small-sufficiency"
THEOREM_TILT = "tilt-characterization"
THEOREM_DENSITY = "density-affine-hull"
WEIGHT_SCAN = "weight-scan"


@dataclass(frozen=True)
class Verdict:
    """一つの性質に対する判定と、機械的に検証できる根拠."""

    property: str
    status: Status
    lspec: str | None = None
    theorem: str | None = None
    evidence: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property,
            "status": self.status.value,
            "lspec": self.lspec,
            "theorem": self.theorem,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class SearchBudget:
    """重み走査と証人探索の予算."""

    weight_box: int = config.WEIGHT_BOX
    prime_sample: tuple[int, ...] = config.PRIME_SAMPLE
    denominator_cap: int = config.DENOMINATOR_CAP
    lattice_radius: int = config.LATTICE_RADIUS

    def __post_init__(self) -> None:
        if self.weight_box < 1:
            raise UsageError("重みの箱 W は 1 以上が必要です")
        if self.denominator_cap < 1 or self.lattice_radius < 1:
            raise UsageError("予算の上限は 1 以上が必要です")
        if not self.prime_sample:
            raise UsageError("素数サンプルが空です")
        LSpec(tuple(self.prime_sample))  # 素数判定

    def to_dict(self) -> dict[str, Any]:
        return {
            "weight_box": self.weight_box,
            "prime_sample": list(self.prime_sample),
            "denominator_cap": self.denominator_cap,
            "lattice_radius": self.lattice_radius,
        }


# --- JSON 向けの変換 (添字は 1 始まり) ---


def rat_str(v: Rat | int) -> str:
    return str(Fraction(v))


def vec_str(v: Iterable[Rat | int]) -> list[str]:
    return [rat_str(x) for x in v]


def one_based(indices: Iterable[int]) -> list[int]:
    return [i + 1 for i in sorted(indices)]


def _implicit_rows(system: LinearSystem) -> list[tuple[int, ...]]:
    return [system.M[i] for i in sorted(implicit_equalities(system))]


def _gsc_evidence(res: GscResult | None) -> dict[str, Any]:
    if res is None:
        return {"vacuous": True}
    return {
        "holds": res.holds,
        "counterexample": None if res.counterexample is None else list(res.counterexample),
        "multiplier_bound": res.multiplier_bound,
        "points_checked": res.points_checked,
        "lineality_rank": res.lineality_rank,
    }


# --- 双対最適解の L 点 ---


@dataclass(frozen=True)
class DualLPoint:
    """双対最適面が L 点を含むか. exact=False なら witness はアフィン包の点."""

    ok: bool
    witness: tuple[Rat, ...] | None = None
    exact: bool = False
    note: str = ""


def dual_has_L_point(
    system: LinearSystem,
    w: Iterable[Rat | int],
    L: LSpec,
    budget: SearchBudget | None = None,
) -> DualLPoint:
    """(D:M,b,w) が L^m の最適解を持つか (双対最適解のアフィン包で判定).

    証人は厳密相補的な双対解 ȳ の近くで、分母 (∏S)^e (e <= denominator_cap) の
    格子に丸めて探す。
    """
    if L.is_integers:
        raise UsageError("Z は heavy ではありません. check_TDI_at を使ってください")
    budget = budget or SearchBudget()
    w = as_weight(system, w)
    hull = dual_affine_hull(system, w)
    base = solve_in_L(hull.N, hull.f, L)
    if base is None:
        return DualLPoint(False)
    m = system.m
    ybar = strictly_complementary_dual(system, w)
    dirs = [primitive(clear_denominators(d)[0]) for d in nullspace(hull.N, m)]
    if not dirs:
        return DualLPoint(True, base, True)
    # ȳ = base + Σ t*_j d_j
    cols = [[dirs[j][i] for j in range(len(dirs))] for i in range(m)]
    t_star = solve_rational(cols, [a - b for a, b in zip(ybar, base)], len(dirs))
    if t_star is None:
        raise InternalError("厳密相補的な双対解がアフィン包に含まれません")
    step = math.prod(L.primes)
    for e in range(budget.denominator_cap + 1):
        k = step**e
        t = [Fraction(math.floor(tj * k + Fraction(1, 2)), k) for tj in t_star]
        y = tuple(
            base[i] + sum((tj * d[i] for tj, d in zip(t, dirs)), Fraction(0))
            for i in range(m)
        )
        if all(v >= 0 for v in y):
            return DualLPoint(True, y, True)
    return DualLPoint(True, base, False, "witness-in-polyhedron pending")


# --- TDI (L = Z) ---


@dataclass(frozen=True)
class TdiCheck:
    """holds = None は非有界な双対最適面を予算内で調べ切れなかったことを表す."""

    holds: bool | None
    witness: tuple[int, ...] | None = None
    exhaustive: bool = True


def check_TDI_at(
    system: LinearSystem, w: Iterable[Rat | int], budget: SearchBudget | None = None
) -> TdiCheck:
    """双対最適面 {y >= 0, Mᵀy = w, y_i = 0 (i ∉ I(F))} が整数点を含むか."""
    budget = budget or SearchBudget()
    w = as_weight(system, w)
    F = optimal_face(system, w)
    if any(v.denominator != 1 for v in w):
        return TdiCheck(False)
    m, n = system.m, system.n
    eq_rows = [[system.M[i][c] for i in range(m)] for c in range(n)]
    eq_rhs = [int(v) for v in w]
    for i in range(m):
        if i not in F.tight_set:
            eq_rows.append([int(i == j) for j in range(m)])
            eq_rhs.append(0)
    ineq = [[-int(i == j) for j in range(m)] for i in range(m)]
    search = lattice_points(eq_rows, eq_rhs, ineq, [0] * m, m, budget.lattice_radius)
    y = search.first()
    if y is not None:
        return TdiCheck(True, y, search.exhaustive)
    return TdiCheck(False if search.exhaustive else None, None, search.exhaustive)


# --- 重みの走査 ---


@dataclass(frozen=True)
class BadWeightSearch:
    """走査の結果. bad が None なら箱内に反例なし."""

    bad: tuple[int, ...] | None
    checked: int
    inadmissible: int
    undecided: tuple[tuple[int, ...], ...] = ()
    lspec: str = ""
    box: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "bad_weight": None if self.bad is None else list(self.bad),
            "checked": self.checked,
            "inadmissible": self.inadmissible,
            "undecided": [list(w) for w in self.undecided],
            "lspec": self.lspec,
            "box": self.box,
        }


def box_weights(n: int, W: int) -> Iterable[tuple[int, ...]]:
    """||w||∞ <= W の整数重みを辞書順に."""
    return itertools.product(range(-W, W + 1), repeat=n)


def search_bad_weight(
    system: LinearSystem,
    L: LSpec,
    budget: SearchBudget | None = None,
    weights: Iterable[Sequence[int]] | None = None,
) -> BadWeightSearch:
    """admissible な整数重みで、双対に L の最適解がないものを探す.

    箱の重みは辞書順に調べるので、見つかるのは辞書順最小の悪い重み。
    """
    budget = budget or SearchBudget()
    candidates = box_weights(system.n, budget.weight_box) if weights is None else weights
    checked = inadmissible = 0
    undecided: list[tuple[int, ...]] = []
    for w in candidates:
        w = tuple(int(v) for v in w)
        if not is_admissible(system, w):
            inadmissible += 1
            continue
        checked += 1
        if L.is_integers:
            res = check_TDI_at(system, w, budget)
            if res.holds is None:
                undecided.append(w)
                continue
            bad = not res.holds
        else:
            bad = not dual_has_L_point(system, w, L, budget).ok
        if bad:
            logger.debug("悪い重み %s (%s)", w, L.label)
            return BadWeightSearch(
                w, checked, inadmissible, tuple(undecided), L.label, budget.weight_box
            )
    return BadWeightSearch(
        None, checked, inadmissible, tuple(undecided), L.label, budget.weight_box
    )


# --- 定理に基づく判定 ---


def canonical_weight(system: LinearSystem, F: Face) -> tuple[int, ...]:
    """w_F = Σ_{i ∈ I(F)} row_i (最適面がちょうど F になる重み)."""
    return tuple(
        sum(system.M[i][c] for i in F.tight_set) for c in range(system.n)
    )


def _condition_i(system: LinearSystem, L: LSpec) -> GscResult | None:
    rows = _implicit_rows(system)
    if not rows:
        return None
    return is_Z_GSC(rows) if L.is_integers else is_L_GSC(rows, L)


def decide_TDI_nondegenerate(system: LinearSystem) -> Verdict:
    """非縮退な系の TDI 判定: M⁼ の行が Hilbert 錐 かつ resilient ⟺ TDI."""
    nd = is_non_degenerate(system)
    if not nd.holds:
        return Verdict(
            "TDI",
            Status.UNDECIDED,
            "Z",
            None,
            {
                "reason": "degenerate",
                "degenerate_face": one_based(nd.witness.tight_set),
            },
        )
    gsc = _condition_i(system, LSpec.integers())
    profile = resiliency_profile(system, 1)
    evidence: dict[str, Any] = {
        "non_degenerate": True,
        "scaled_pair_collapsed": nd.scaled_pair_collapsed,
        "hilbert_cone": _gsc_evidence(gsc),
        "integral": profile.integral,
        "shifts": list(profile.shifts),
        "vacuous_rows": one_based(profile.vacuous_rows),
    }
    if gsc is not None and not gsc.holds:
        evidence["failed"] = "hilbert-cone"
        return Verdict("TDI", Status.REFUTED, "Z", THEOREM_NONDEGENERATE_TDI, evidence)
    if not profile.integral:
        witness = is_integral(system).witness
        evidence["failed"] = "integral"
        evidence["fractional_point"] = vec_str(witness.point)
        return Verdict("TDI", Status.REFUTED, "Z", THEOREM_NONDEGENERATE_TDI, evidence)
    if not profile.resilient:
        rows = profile.failing_rows(1)
        evidence["failed"] = "resilient"
        evidence["rows"] = one_based(rows)
        evidence["fractional_points"] = {
            str(i + 1): vec_str(p) for i, p in sorted(profile.fractional_points.items())
        }
        return Verdict("TDI", Status.REFUTED, "Z", THEOREM_NONDEGENERATE_TDI, evidence)
    return Verdict("TDI", Status.CERTIFIED, "Z", THEOREM_NONDEGENERATE_TDI, evidence)


def certify_TD_in_L(system: LinearSystem, L: LSpec) -> Verdict:
    """十分条件による TD in L の証明: (i) M⁼ が L-GSC, (ii) 1/p-resilient (または p-small).

    p は L が q = 2..p の除算に閉じている最大の値。反証はしない。
    """
    prop = "TD-in-L"
    if L.is_integers:
        verdict = decide_TDI_nondegenerate(system)
        if verdict.status is Status.CERTIFIED:
            return Verdict(prop, Status.CERTIFIED, "Z", verdict.theorem, verdict.evidence)
        return Verdict(
            prop, Status.UNDECIDED, "Z", None,
            {"reason": "sufficient conditions not met", "tdi_check": verdict.to_dict()},
        )
    p = L.closed_under_division_up_to()
    gsc = _condition_i(system, L)
    evidence: dict[str, Any] = {"p": p, "gsc": _gsc_evidence(gsc)}
    if gsc is not None and not gsc.holds:
        evidence["failed"] = "gsc"
        return Verdict(prop, Status.UNDECIDED, L.label, None, evidence)
    small = is_p_small(system, p)
    evidence["p_small"] = small.holds
    if small.holds:
        evidence["max_slack"] = rat_str(small.max_slack)
        return Verdict(prop, Status.CERTIFIED, L.label, THEOREM_P_SMALL, evidence)
    profile = resiliency_profile(system, p)
    evidence.update(
        integral=profile.integral,
        shifts=list(profile.shifts),
        vacuous_rows=one_based(profile.vacuous_rows),
        resilient=profile.resilient,
        half_resilient=profile.half_resilient,
    )
    if profile.p_resilient:
        return Verdict(prop, Status.CERTIFIED, L.label, THEOREM_RESILIENCY, evidence)
    evidence["failed"] = "resiliency"
    evidence["rows"] = one_based(profile.failing_rows(p))
    return Verdict(prop, Status.UNDECIDED, L.label, None, evidence)


# --- チルト制約による特徴付け ---


@dataclass(frozen=True)
class TiltCheck:
    face: tuple[int, ...]
    down_face: tuple[int, ...]
    w: tuple[int, ...]
    tilt: TiltConstraint
    solvable: bool
    witness: tuple[Rat, ...] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "face": one_based(self.face),
            "down_face": one_based(self.down_face),
            "w": list(self.w),
            "tilt": self.tilt.render(),
            "solvable": self.solvable,
            "witness": None if self.witness is None else vec_str(self.witness),
        }


@dataclass(frozen=True)
class MainCharReport:
    status: Status
    condition_i: GscResult | None
    checks: tuple[TiltCheck, ...]
    failure: TiltCheck | None = None
    mode: str = "all"

    def to_verdict(self, L: LSpec) -> Verdict:
        evidence = {
            "mode": self.mode,
            "condition_i": _gsc_evidence(self.condition_i),
            "tilt_checks": [c.to_dict() for c in self.checks],
        }
        if self.failure is not None:
            evidence["failure"] = self.failure.to_dict()
        theorem = THEOREM_TILT if self.status is Status.REFUTED else None
        return Verdict("TD-in-L", self.status, L.label, theorem, evidence)


def _tilt_checks_for(
    system: LinearSystem, w: tuple[int, ...], F: Face, L: LSpec
) -> list[TiltCheck]:
    out = []
    for Fplus in down_faces(F):
        t = tilt_constraint(system, w, F, Fplus)
        sol = tilt_solvable(t, L)
        out.append(TiltCheck(F.indices, Fplus.indices, w, t, sol.ok, sol.witness))
    return out


def check_main_char(
    system: LinearSystem,
    L: LSpec,
    budget: SearchBudget | None = None,
    mode: str = "all",
) -> MainCharReport:
    """(i) M⁼ の行が L-GSC, (ii) チルト制約が L で解ける を調べる.

    (ii) は各面の標準重み w_F と箱内の admissible な整数重みについて調べる。
    mode="all" はすべての down-face、mode="some" は少なくとも一つで解ければよい。
    """
    if not L.is_heavy:
        raise UsageError("チルト制約による特徴付けには heavy な L (素数の集合) が必要です")
    if mode not in ("all", "some"):
        raise UsageError(f"mode は all か some: {mode!r}")
    budget = budget or SearchBudget()
    cond_i = _condition_i(system, L)
    if cond_i is not None and not cond_i.holds:
        return MainCharReport(Status.REFUTED, cond_i, (), None, mode)

    weights: list[tuple[tuple[int, ...], Face]] = []
    for F in enumerate_faces(system):
        if down_faces(F):
            weights.append((canonical_weight(system, F), F))
    for w in box_weights(system.n, budget.weight_box):
        if is_admissible(system, w):
            weights.append((w, optimal_face(system, w)))

    checks: list[TiltCheck] = []
    seen: set[tuple] = set()
    for w, F in weights:
        group = _tilt_checks_for(system, w, F, L)
        if not group:
            continue
        key = (F.tight_set, tuple((c.down_face, c.tilt) for c in group))
        fresh = key not in seen
        seen.add(key)
        if fresh:
            checks.extend(group)
        failed = [c for c in group if not c.solvable]
        if (mode == "all" and failed) or (mode == "some" and len(failed) == len(group)):
            if not fresh:
                checks.extend(group)
            return MainCharReport(Status.REFUTED, cond_i, tuple(checks), failed[0], mode)
    return MainCharReport(Status.UNDECIDED, cond_i, tuple(checks), None, mode)


# --- near-TDI と TD in L の走査 ---


def near_TDI_sample(system: LinearSystem, budget: SearchBudget | None = None) -> Verdict:
    """素数サンプルごとに悪い重みを探す. 証明は Hilbert 錐 + resilient のみ."""
    budget = budget or SearchBudget()
    scans = []
    for p in budget.prime_sample:
        res = search_bad_weight(system, LSpec.of(p), budget)
        scans.append(res.to_dict())
        if res.bad is not None:
            return Verdict(
                "near-TDI",
                Status.REFUTED,
                LSpec.of(p).label,
                WEIGHT_SCAN,
                {
                    "prime": p,
                    "bad_weight": list(res.bad),
                    "criterion": THEOREM_DENSITY,
                    "scans": scans,
                },
            )
    evidence: dict[str, Any] = {"scans": scans, "budget": budget.to_dict()}
    gsc = _condition_i(system, LSpec.integers())
    profile = resiliency_profile(system, 1)
    evidence.update(hilbert_cone=_gsc_evidence(gsc), shifts=list(profile.shifts))
    if (gsc is None or gsc.holds) and profile.resilient:
        return Verdict("near-TDI", Status.CERTIFIED, None, THEOREM_RESILIENCY, evidence)
    return Verdict("near-TDI", Status.UNDECIDED, None, None, evidence)


def scan_TD_in_L(
    system: LinearSystem, L: LSpec, budget: SearchBudget | None = None, prop: str = "TD-in-L"
) -> Verdict:
    """箱内の重みで TD in L を反証しようとする. 見つからなければ Undecided."""
    budget = budget or SearchBudget()
    res = search_bad_weight(system, L, budget)
    if res.bad is not None:
        evidence: dict[str, Any] = {"bad_weight": list(res.bad), "scan": res.to_dict()}
        if L.is_heavy:
            # 双対最適面のアフィン包に L 点がない
            evidence["criterion"] = THEOREM_DENSITY
        return Verdict(prop, Status.REFUTED, L.label, WEIGHT_SCAN, evidence)
    return Verdict(
        prop, Status.UNDECIDED, L.label, None,
        {"scan": res.to_dict(), "budget": budget.to_dict()},
    )


def assert_hierarchy(system: LinearSystem, verdicts: Iterable[Verdict]) -> None:
    """TDI ⇒ near-TDI ⇒ 整数的 の階層に矛盾する判定があれば InternalError."""
    by_prop: dict[str, list[Verdict]] = {}
    for v in verdicts:
        by_prop.setdefault(v.property, []).append(v)
    tdi_cert = any(v.status is Status.CERTIFIED for v in by_prop.get("TDI", []))
    near = by_prop.get("near-TDI", [])
    near_refuted = any(v.status is Status.REFUTED for v in near)
    near_cert = any(v.status is Status.CERTIFIED for v in near)
    if tdi_cert and near_refuted:
        raise InternalError("TDI と証明された系が near-TDI で反証されました")
    if tdi_cert or near_cert:
        if not is_integral(system).holds:
            raise InternalError("TDI / near-TDI と証明された系が整数的ではありません")
