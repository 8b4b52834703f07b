"""dualcert 全体で使う例外クラス."""

from __future__ import annotations


class DualCertError(Exception):
    """dualcert の全例外の基底クラス."""


class UsageError(DualCertError, ValueError):
    """前提条件違反 (次元不一致・不正なインデックスなど)."""


class InfeasibleSystemError(DualCertError):
    """空でない多面体が必要な箇所で {x : Mx <= b} が空だった."""


class AdmissibilityError(DualCertError):
    """最適解を持たない重み w が渡された."""


class ResourceLimitError(DualCertError):
    """設定された上限を超えた. どの上限かをメッセージに含める."""

    def __init__(self, limit: str, value: int, cap: int) -> None:
        self.limit = limit
        self.value = value
        self.cap = cap
        super().__init__(
            f"上限 {limit} を超えました: {value} > {cap} "
            f"(環境変数または CLI フラグで変更できます)"
        )


class DegenerateClutterError(DualCertError):
    """{∅} または ∅ のクラッターに多面体操作を適用しようとした."""


class ClutterInvariantError(DualCertError):
    """クラッターのメンバー間に包含関係がある."""

    def __init__(self, pair: tuple[tuple[int, ...], tuple[int, ...]]) -> None:
        self.pair = pair
        small, large = (
            "{" + ",".join(str(e + 1) for e in member) + "}" for member in pair
        )
        super().__init__(f"クラッターではありません: {small} ⊆ {large}")


class InputFormatError(DualCertError):
    """入力ファイルの解析エラー. line は 1 始まり (不明なら None)."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"{line} 行目: " if line is not None else ""
        super().__init__(prefix + message)


class InternalError(DualCertError, AssertionError):
    """内部不変条件の破綻 (階層の矛盾・証明書の再検証失敗など)."""
