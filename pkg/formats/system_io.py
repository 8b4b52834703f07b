"""系の JSON 入力 {"M": [[int]], "b": [int]} とクラッターのテキスト入力."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from clutter import Clutter, parse_clutter
from errors import InputFormatError, UsageError
from polyhedron import LinearSystem

_SCALING_HINT = "有理数の係数は使えません. 行ごとに分母の最小公倍数を掛けて整数にしてください"


def _read(path: str | Path) -> str:
    p = Path(path)
    try:
        return p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputFormatError(f"ファイルが見つかりません: {p}") from None
    except UnicodeDecodeError:
        raise InputFormatError(f"UTF-8 として読めません: {p}") from None


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(rf'"{re.escape(key)}"\s*:')
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return lineno
    return None


def _as_int(value: object, where: str, line: int | None) -> int:
    if isinstance(value, bool):
        raise InputFormatError(f"{where}: 真偽値は使えません", line)
    if isinstance(value, int):
        return value
    if isinstance(value, float) or (
        isinstance(value, str) and re.fullmatch(r"\s*-?\d+\s*/\s*\d+\s*", value)
    ):
        scale = ""
        try:
            scale = f" (この値の分母は {Fraction(value).limit_denominator(10**6).denominator})"
        except (ValueError, ZeroDivisionError):
            pass
        raise InputFormatError(f"{where} = {value!r}: {_SCALING_HINT}{scale}", line)
    raise InputFormatError(f"{where}: 整数が必要です ({value!r})", line)


def parse_system(text: str) -> LinearSystem:
    """JSON テキストから LinearSystem を作る. 位置の分かるエラーには行番号を付ける."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"JSON の構文エラー: {e.msg}", e.lineno) from None
    if not isinstance(data, dict) or "M" not in data or "b" not in data:
        raise InputFormatError('キー "M" と "b" を持つオブジェクトが必要です', 1)
    m_line, b_line = _line_of(text, "M"), _line_of(text, "b")
    M_raw, b_raw = data["M"], data["b"]
    if not isinstance(M_raw, list) or not M_raw or not all(isinstance(r, list) for r in M_raw):
        raise InputFormatError('"M" は整数の 2 次元配列が必要です', m_line)
    if not isinstance(b_raw, list):
        raise InputFormatError('"b" は整数の配列が必要です', b_line)
    M = [
        [_as_int(v, f"M[{i + 1}][{j + 1}]", m_line) for j, v in enumerate(row)]
        for i, row in enumerate(M_raw)
    ]
    b = [_as_int(v, f"b[{i + 1}]", b_line) for i, v in enumerate(b_raw)]
    try:
        return LinearSystem.of(M, b)
    except UsageError as e:
        raise InputFormatError(str(e), m_line) from None


def load_system(path: str | Path) -> LinearSystem:
    return parse_system(_read(path))


def load_clutter(path: str | Path) -> Clutter:
    return parse_clutter(_read(path))
