"""入力ファイル (系の JSON, クラッターのテキスト) とレポートの入出力."""

from formats.report import Report, exit_code, render_text
from formats.system_io import load_clutter, load_system, parse_system

__all__ = [
    "Report",
    "exit_code",
    "load_clutter",
    "load_system",
    "parse_system",
    "render_text",
]
