"""判定レポート (JSON schema 1) と人間向けの表示."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import config
from analyzer import Status, Verdict

_ICONS = {
    Status.CERTIFIED: "✅",
    Status.REFUTED: "❌",
    Status.UNDECIDED: "⚠",
}

# 終了コード: 判定ごとに一つ
EXIT_CODES = {
    Status.CERTIFIED: 0,
    Status.REFUTED: 1,
    Status.UNDECIDED: 2,
}


@dataclass
class Report:
    """一回のコマンド実行の結果. timing は比較・再現性の対象外."""

    command: str
    input: dict[str, Any]
    verdicts: list[Verdict] = field(default_factory=list)
    results: dict[str, Any] = field(default_factory=dict)
    budget: dict[str, Any] | None = None
    timing: float | None = field(default=None, compare=False)
    schema: int = config.REPORT_SCHEMA

    @property
    def theorems(self) -> list[str]:
        """適用した定理 (重複なし, 出現順)."""
        seen: list[str] = []
        for v in self.verdicts:
            if v.theorem and v.theorem not in seen:
                seen.append(v.theorem)
        return seen

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema": self.schema,
            "command": self.command,
            "input": self.input,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "results": self.results,
            "budget": self.budget,
            "theorems": self.theorems,
        }
        if include_timing:
            out["timing"] = {"seconds": self.timing}
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(
            self.to_dict(include_timing), sort_keys=True, indent=2, ensure_ascii=False
        )

    @classmethod
    def from_json(cls, text: str) -> Report:
        data = json.loads(text)
        if data.get("schema") != config.REPORT_SCHEMA:
            raise ValueError(f"未対応の schema: {data.get('schema')!r}")
        verdicts = [
            Verdict(
                v["property"],
                Status(v["status"]),
                v.get("lspec"),
                v.get("theorem"),
                v.get("evidence") or {},
            )
            for v in data.get("verdicts", [])
        ]
        timing = (data.get("timing") or {}).get("seconds")
        return cls(
            data["command"],
            data["input"],
            verdicts,
            data.get("results") or {},
            data.get("budget"),
            timing,
            data["schema"],
        )


def exit_code(report: Report) -> int:
    """反証が一つでもあれば 1, すべて証明なら 0, それ以外は 2. 判定なしは 0."""
    if not report.verdicts:
        return 0
    statuses = {v.status for v in report.verdicts}
    if Status.REFUTED in statuses:
        return EXIT_CODES[Status.REFUTED]
    if statuses == {Status.CERTIFIED}:
        return EXIT_CODES[Status.CERTIFIED]
    return EXIT_CODES[Status.UNDECIDED]


def _fmt_value(value: Any) -> str:
    if isinstance(value, list):
        return "(" + ", ".join(_fmt_value(v) for v in value) + ")"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt_value(v)}" for k, v in value.items()) + "}"
    return str(value)


_SUMMARY_KEYS = (
    "failed",
    "rows",
    "bad_weight",
    "prime",
    "p",
    "shifts",
    "fractional_point",
    "degenerate_face",
    "reason",
    "tdi",
)


def render_text(report: Report) -> str:
    """端末向けの要約 (行番号・面の添字は 1 始まり)."""
    lines = [f"# dualcert {report.command}"]
    for v in report.verdicts:
        where = f" in {v.lspec}" if v.lspec else ""
        cite = f"  [{v.theorem}]" if v.theorem else ""
        lines.append(f"{_ICONS[v.status]}  {v.property}{where}: {v.status.value}{cite}")
        for key in _SUMMARY_KEYS:
            if key in v.evidence and v.evidence[key] not in (None, [], {}):
                lines.append(f"    {key}: {_fmt_value(v.evidence[key])}")
        failure = v.evidence.get("failure")
        if failure:
            lines.append(
                f"    tilt: {failure['tilt']}  (w={_fmt_value(failure['w'])}, "
                f"F={_fmt_value(failure['face'])}, F⁺={_fmt_value(failure['down_face'])})"
            )
    for key, value in report.results.items():
        lines.append(f"ℹ  {key}: {_fmt_value(value)}")
    return "\n".join(lines) + "\n"
