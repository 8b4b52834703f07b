"""アプリケーションオーケストレーター: analyze / tilt / clutter の各コマンドを実行する."""

from __future__ import annotations

import enum
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence, TextIO

import config
from analyzer import (
    SearchBudget,
    Status,
    Verdict,
    assert_hierarchy,
    certify_TD_in_L,
    check_main_char,
    decide_TDI_nondegenerate,
    near_TDI_sample,
    one_based,
    rat_str,
    scan_TD_in_L,
    vec_str,
)
from clutter import (
    blocker,
    brace_report,
    fmt_members,
    intersection_profile,
    is_ideal,
    verify_TDD_clutter,
)
from errors import UsageError
from exact_linalg import LSpec
from exact_lp import solve
from formats import Report, load_clutter, load_system
from polyhedron import LinearSystem, face_from_tight, is_integral
from tilt_brace import (
    brace_to_tilt_solution,
    find_brace,
    tilt_constraint,
    tilt_solvable,
)

logger = logging.getLogger(__name__)


class Check(enum.Enum):
    """analyze で調べる性質."""

    TDI = "tdi"
    TDD = "tdd"
    NEAR_TDI = "near-tdi"
    TD_IN_L = "td-in-l"


def _relabel(v: Verdict, prop: str) -> Verdict:
    return Verdict(prop, v.status, v.lspec, v.theorem, v.evidence)


def _settle(
    system: LinearSystem, first: Verdict, L: LSpec, budget: SearchBudget, prop: str
) -> Verdict:
    """定理で決まらなければ重みの走査で反証を試みる."""
    if first.status is not Status.UNDECIDED:
        return first
    scanned = scan_TD_in_L(system, L, budget, prop)
    if scanned.status is Status.REFUTED:
        return scanned
    return Verdict(
        prop,
        Status.UNDECIDED,
        first.lspec,
        None,
        {**first.evidence, **scanned.evidence},
    )


def analyze_system(
    system: LinearSystem,
    check: Check,
    budget: SearchBudget | None = None,
    lspec: LSpec | None = None,
    mode: str = "all",
) -> list[Verdict]:
    """一つの性質を判定し、TDI ⇒ near-TDI ⇒ 整数的 の階層と矛盾しないことを確かめる."""
    budget = budget or SearchBudget()
    match check:
        case Check.TDI:
            first = decide_TDI_nondegenerate(system)
            verdicts = [_settle(system, first, LSpec.integers(), budget, "TDI")]
        case Check.TDD:
            L = LSpec.of(2)
            first = _relabel(certify_TD_in_L(system, L), "TDD")
            verdicts = [_settle(system, first, L, budget, "TDD")]
        case Check.NEAR_TDI:
            verdicts = [near_TDI_sample(system, budget)]
        case Check.TD_IN_L:
            L = lspec or LSpec.of(2)
            first = certify_TD_in_L(system, L)
            if (
                first.status is Status.UNDECIDED
                and L.is_heavy
                and system.m <= config.FACE_ROW_CAP
            ):
                char = check_main_char(system, L, budget, mode).to_verdict(L)
                if char.status is Status.REFUTED:
                    first = char
            verdicts = [_settle(system, first, L, budget, "TD-in-L")]
    assert_hierarchy(system, verdicts)
    return verdicts


def _system_echo(system: LinearSystem) -> dict[str, Any]:
    return {"M": [list(r) for r in system.M], "b": list(system.b)}


class App:
    """dualcert のコマンド実行. 進捗は stderr に表示し、stdout はレポート専用."""

    def __init__(self, budget: SearchBudget | None = None, out: TextIO | None = None) -> None:
        self._budget = budget or SearchBudget()
        self._out = out if out is not None else sys.stderr

    def _status(self, icon: str, message: str) -> None:
        print(f"{icon}  {message}", file=self._out)

    # --- analyze ---

    def cmd_analyze(
        self,
        path: str | Path,
        check: Check,
        lspec: LSpec | None = None,
        mode: str = "all",
    ) -> Report:
        system = load_system(path)
        self._status("🔍", f"{path}: m={system.m}, n={system.n}, --check {check.value}")
        started = time.perf_counter()
        verdicts = analyze_system(system, check, self._budget, lspec, mode)
        for v in verdicts:
            where = f" in {v.lspec}" if v.lspec else ""
            icon = {"Certified": "✅", "Refuted": "❌"}.get(v.status.value, "⚠")
            self._status(icon, f"{v.property}{where}: {v.status.value}")
        echo = {"path": str(path), "check": check.value, "system": _system_echo(system)}
        if lspec is not None:
            echo["lspec"] = lspec.label
        return Report(
            "analyze",
            echo,
            verdicts,
            budget=self._budget.to_dict(),
            timing=time.perf_counter() - started,
        )

    # --- tilt ---

    def cmd_tilt(
        self,
        path: str | Path,
        w: Sequence[int],
        face: Sequence[int],
        downface: Sequence[int],
        lspecs: Sequence[LSpec] = (),
        max_gap: int = 4,
    ) -> Report:
        """(w, F, F⁺) チルト制約の正規形と、指定した L ごとの可解性. 添字は 1 始まり."""
        system = load_system(path)
        started = time.perf_counter()
        for i in [*face, *downface]:
            if not 1 <= i <= system.m:
                raise UsageError(f"行番号 {i} は 1..{system.m} の範囲外です")
        F = face_from_tight(system, [i - 1 for i in face])
        Fplus = face_from_tight(system, [i - 1 for i in downface])
        t = tilt_constraint(system, w, F, Fplus)
        self._status("📐", f"チルト制約: {t.render()}")
        lspecs = list(lspecs) or [LSpec.integers(), LSpec.of(2)]
        solvability = {}
        for L in lspecs:
            sol = tilt_solvable(t, L)
            solvability[L.label] = {
                "solvable": sol.ok,
                "witness": None if sol.witness is None else vec_str(sol.witness),
            }
            self._status("✅" if sol.ok else "❌", f"{L.label}: {'解あり' if sol.ok else '解なし'}")
        prov = t.provenance
        results: dict[str, Any] = {
            "tilt": t.render(),
            "index_set": one_based(t.index_set),
            "coeff": list(t.coeff),
            "rhs": t.rhs,
            "face": one_based(F.tight_set),
            "down_face": one_based(Fplus.tight_set),
            "rho": vec_str(prov.rho),
            "tau": rat_str(prov.tau),
            "solvability": solvability,
        }
        brace = find_brace(system, F, Fplus, max_gap)
        results["brace"] = None if brace is None else brace_report(brace)
        if brace is not None and is_integral(system).holds:
            u = brace_to_tilt_solution(system, w, F, Fplus, brace)
            results["brace_solution"] = vec_str(u)
        return Report(
            "tilt",
            {
                "path": str(path),
                "w": list(w),
                "face": list(face),
                "downface": list(downface),
                "system": _system_echo(system),
                "optimum": rat_str(solve(system, w).value),
            },
            [],
            results,
            timing=time.perf_counter() - started,
        )

    # --- clutter ---

    def cmd_clutter(
        self,
        path: str | Path,
        show_blocker: bool = False,
        ideal: bool = False,
        profile: bool = False,
        tdd: bool = False,
    ) -> Report:
        """クラッターの操作. フラグを一つも指定しなければすべて実行する."""
        C = load_clutter(path)
        started = time.perf_counter()
        if not (show_blocker or ideal or profile or tdd):
            show_blocker = ideal = profile = tdd = True
        self._status("🔍", f"{path}: n={C.ground_size}, |C|={len(C.members)}")
        results: dict[str, Any] = {}
        verdicts: list[Verdict] = []
        if show_blocker:
            results["blocker"] = fmt_members(blocker(C))
        if ideal:
            res = is_ideal(C)
            results["ideal"] = res.holds
            if not res.holds:
                results["fractional_vertex"] = vec_str(res.fractional_vertex)
            self._status("✅" if res.holds else "❌", f"理想的: {res.holds}")
        if profile:
            results["profile"] = intersection_profile(C).to_dict()
        if tdd:
            v = verify_TDD_clutter(C, self._budget)
            verdicts.append(v)
            self._status({"Certified": "✅", "Refuted": "❌"}.get(v.status.value, "⚠"),
                         f"TDD: {v.status.value}")
        return Report(
            "clutter",
            {"path": str(path), "ground_size": C.ground_size, "members": fmt_members(C)},
            verdicts,
            results,
            budget=self._budget.to_dict() if tdd else None,
            timing=time.perf_counter() - started,
        )
