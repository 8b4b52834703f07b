"""アプリケーション全体の設定定数."""

import os
from pathlib import Path

from dotenv import load_dotenv

# .env ファイルの読み込み
load_dotenv(Path(__file__).parent / ".env")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


def _primes_env(name: str, default: tuple[int, ...]) -> tuple[int, ...]:
    raw = os.getenv(name)
    if not raw:
        return default
    return tuple(int(p) for p in raw.replace(" ", "").split(",") if p)


# --- 探索予算 (SearchBudget の既定値) ---
WEIGHT_BOX = _int_env("DUALCERT_BOX", 3)  # ||w||∞ <= W の整数重みを走査
PRIME_SAMPLE = _primes_env("DUALCERT_PRIMES", (2, 3, 5))  # near-TDI 用
DENOMINATOR_CAP = _int_env("DUALCERT_DENOM_CAP", 10)  # 証人探索の分母の指数上限
LATTICE_RADIUS = _int_env("DUALCERT_LATTICE_RADIUS", 12)  # 非有界方向の探索半径

# --- 計算量の上限 (超えたら ResourceLimitError) ---
ZONOTOPE_CAP = _int_env("DUALCERT_ZONOTOPE_CAP", 10**6)  # GSC 判定で調べる格子点数
GENERATOR_CAP = _int_env("DUALCERT_GENERATOR_CAP", 24)  # GSC 判定の生成元数
FACE_ROW_CAP = _int_env("DUALCERT_FACE_ROW_CAP", 16)  # 面束列挙の行数 m
LATTICE_CAP = _int_env("DUALCERT_LATTICE_CAP", 200_000)  # 有界格子点列挙の候補数
BLOCKER_CAP = _int_env("DUALCERT_BLOCKER_CAP", 12)  # ブロッカー列挙の台集合サイズ
BASIS_CAP = _int_env("DUALCERT_BASIS_CAP", 200_000)  # 極小面列挙で調べる行部分集合数

# --- レポート ---
REPORT_SCHEMA = 1
