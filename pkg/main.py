"""dualcert: 整数系 Mx <= b の双対整数性 (TDI / near-TDI / TDD / TD in L) の判定ツール.

analyze で系の性質を判定し、tilt でチルト制約を表示し、
clutter でクラッターの理想性と TDD を調べる。
"""

from __future__ import annotations

import argparse
import logging
import sys

import config
from analyzer import SearchBudget
from app import App, Check
from errors import DualCertError, InternalError, ResourceLimitError
from exact_linalg import LSpec
from formats import exit_code, render_text

# 終了コード (0/1/2 は判定の状態, formats.report.EXIT_CODES)
EXIT_USAGE = 3
EXIT_RESOURCE = 4
EXIT_INTERNAL = 5


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"整数のカンマ区切りが必要です: {text!r}") from None


def _lspec(text: str) -> LSpec:
    try:
        return LSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualcert", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", action="store_true", help="DEBUG ログを表示")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_budget(p: argparse.ArgumentParser) -> None:
        p.add_argument("--box", type=int, default=config.WEIGHT_BOX, help="重みの箱 W")
        p.add_argument("--json", action="store_true", help="JSON レポートを出力")

    analyze = sub.add_parser("analyze", help="系の性質を判定する")
    analyze.add_argument("path")
    analyze.add_argument(
        "--check", type=Check, choices=list(Check), default=Check.TDI,
        metavar="{tdi,tdd,near-tdi,td-in-l}",
    )
    analyze.add_argument(
        "--primes", type=_int_list, default=None,
        help="td-in-l では S、near-tdi では素数サンプル (例: 2,3)",
    )
    analyze.add_argument("--denom-cap", type=int, default=config.DENOMINATOR_CAP)
    analyze.add_argument("--mode", choices=("all", "some"), default="all")
    add_budget(analyze)

    tilt = sub.add_parser("tilt", help="チルト制約を表示する")
    tilt.add_argument("path")
    tilt.add_argument("--w", type=_int_list, required=True, help="重み (例: --w=0,1)")
    tilt.add_argument("--face", type=_int_list, required=True, help="I(F) (1 始まり)")
    tilt.add_argument("--downface", type=_int_list, required=True, help="I(F⁺) (1 始まり)")
    tilt.add_argument("--lspec", type=_lspec, action="append", default=[], help="Z または 2,3")
    tilt.add_argument("--max-gap", type=int, default=4, help="ブレース探索の gap 上限")
    tilt.add_argument("--json", action="store_true", help="JSON レポートを出力")

    clutter = sub.add_parser("clutter", help="クラッターを調べる")
    clutter.add_argument("path")
    clutter.add_argument("--blocker", action="store_true")
    clutter.add_argument("--ideal", action="store_true")
    clutter.add_argument("--profile", action="store_true")
    clutter.add_argument("--tdd", action="store_true")
    add_budget(clutter)
    return parser


def run(argv: list[str] | None = None) -> int:
    """引数を解釈して実行し、終了コードを返す."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse は 2 で終了するが、2 は Undecided に使う
        return EXIT_USAGE if e.code else 0
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "analyze":
            primes = tuple(args.primes) if args.primes else config.PRIME_SAMPLE
            budget = SearchBudget(
                weight_box=args.box,
                prime_sample=primes,
                denominator_cap=args.denom_cap,
            )
            lspec = LSpec.of(*args.primes) if args.primes else None
            report = App(budget).cmd_analyze(args.path, args.check, lspec, args.mode)
        elif args.command == "tilt":
            report = App().cmd_tilt(
                args.path, args.w, args.face, args.downface, args.lspec, args.max_gap
            )
        else:
            report = App(SearchBudget(weight_box=args.box)).cmd_clutter(
                args.path, args.blocker, args.ideal, args.profile, args.tdd
            )
    except ResourceLimitError as e:
        print(f"⚠  {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except InternalError as e:
        print(f"❌ 内部エラー: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except DualCertError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    print(report.to_json() if args.json else render_text(report), end="\n" if args.json else "")
    return exit_code(report)


def main() -> None:
    """エントリーポイント."""
    try:
        code = run()
    except KeyboardInterrupt:
        print("\n中断しました", file=sys.stderr)
        code = 130
    finally:
        logging.shutdown()
    sys.exit(code)


if __name__ == "__main__":
    main()
