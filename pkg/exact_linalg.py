"""整数・有理数上の厳密線形代数.

gcd/Bezout、Hermite/Smith 標準形、Z および L(S) 上の連立方程式の可解性、
整数ベクトル族の生成集合判定 (GSS / GSC) を提供する。
行列は dtype=object の numpy 配列 (要素は Python int) で扱う。
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import ceil, gcd
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import sympy

import config
from errors import ResourceLimitError, UsageError
from simplex import LpStatus, feasible_point, in_cone, maximize

logger = logging.getLogger(__name__)

Rat = Fraction
IntMat = np.ndarray  # 2 次元, dtype=object, 要素は int


# --- 係数領域 L ---


@dataclass(frozen=True)
class LSpec:
    """係数領域: primes が空なら整数 Z、そうでなければ L(S) (S = primes).

    L(S) は分母が S の素数のべきの積であるような有理数全体。
    Z は heavy でないため、稠密性に依存する判定では明示的に拒否される。
    """

    primes: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        ps = tuple(sorted(set(int(p) for p in self.primes)))
        for p in ps:
            if not sympy.isprime(p):
                raise UsageError(f"{p} は素数ではありません")
        object.__setattr__(self, "primes", ps)

    @classmethod
    def integers(cls) -> LSpec:
        return cls(())

    @classmethod
    def of(cls, *primes: int) -> LSpec:
        if not primes:
            raise UsageError("L(S) には少なくとも 1 つの素数が必要です")
        return cls(tuple(primes))

    @classmethod
    def parse(cls, text: str) -> LSpec:
        """'Z' または '2,3' のような文字列から作る."""
        t = text.strip()
        if t.upper() in ("Z", "INT", "INTEGERS"):
            return cls.integers()
        try:
            return cls.of(*(int(p) for p in t.split(",") if p.strip()))
        except ValueError as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError(f"係数領域を解釈できません: {text!r}") from e

    @property
    def is_integers(self) -> bool:
        return not self.primes

    @property
    def is_heavy(self) -> bool:
        return bool(self.primes)

    @property
    def label(self) -> str:
        if self.is_integers:
            return "Z"
        return "L({" + ",".join(map(str, self.primes)) + "})"

    def is_s_number(self, k: int) -> bool:
        """k (> 0) の素因数がすべて S に含まれるか."""
        if k <= 0:
            return False
        for p in self.primes:
            k //= p ** valuation(k, p)
        return k == 1

    def divides_in_L(self, d: int, c: int) -> bool:
        """c/d ∈ L か. S 外の素数 q で v_q(d) <= v_q(c) と同値 (d != 0)."""
        if c == 0:
            return True
        return all(
            valuation(d, q) <= valuation(c, q)
            for q in sympy.primefactors(d)
            if q not in self.primes
        )

    def contains(self, q: Rat | int) -> bool:
        return self.is_s_number(Fraction(q).denominator)

    def closed_under_division_up_to(self) -> int:
        """q = 2..p のすべてで q 除算に閉じている最大の p (Z なら 1)."""
        p = 2
        while p in self.primes:
            p = sympy.nextprime(p)
        return p - 1

    def s_numbers(self, exponent_cap: int) -> Iterable[int]:
        """指数がそれぞれ exponent_cap 以下の S 数を昇順で返す."""
        values = {1}
        for p in self.primes:
            values = {v * p**e for v in values for e in range(exponent_cap + 1)}
        return sorted(values)


# --- 行列ユーティリティ ---


def as_intmat(A: Sequence[Sequence[int]] | np.ndarray) -> IntMat:
    """整数行列を dtype=object の 2 次元配列に正規化する."""
    rows = [list(r) for r in A]
    if not rows:
        raise UsageError("空の行列です")
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != width:
            raise UsageError("行の長さが揃っていません")
        for j, v in enumerate(r):
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise UsageError(f"整数でない成分 {v} があります")
                v = v.numerator
            elif isinstance(v, float):
                raise UsageError("浮動小数点数は受け付けません")
            out[i, j] = int(v)
    return out


def as_intvec(b: Iterable[int]) -> list[int]:
    out = []
    for v in b:
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise UsageError(f"整数でない成分 {v} があります")
            v = v.numerator
        elif isinstance(v, float):
            raise UsageError("浮動小数点数は受け付けません")
        out.append(int(v))
    return out


def identity(k: int) -> IntMat:
    I = np.zeros((k, k), dtype=object)
    for i in range(k):
        I[i, i] = 1
    return I


def gcd_list(xs: Iterable[int]) -> int:
    return reduce(gcd, (abs(int(x)) for x in xs), 0)


def lcm_list(xs: Iterable[int]) -> int:
    out = 1
    for x in xs:
        x = abs(int(x))
        if x:
            out = out * x // gcd(out, x)
    return out


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """成分の gcd で割った整数ベクトル (向きは保つ)."""
    g = gcd_list(v)
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def canonical_line(v: Sequence[int]) -> tuple[int, ...]:
    """primitive 化し、最初の非零成分を正にする (直線の代表元)."""
    p = primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    return p


def clear_denominators(v: Sequence[Rat | int]) -> tuple[tuple[int, ...], int]:
    """v = w / k となる整数ベクトル w と最小の k >= 1."""
    k = lcm_list(Fraction(x).denominator for x in v)
    return tuple(int(Fraction(x) * k) for x in v), k


def valuation(k: int, q: int) -> int:
    """q 進付値 v_q(k). k = 0 は UsageError."""
    if k == 0:
        raise UsageError("0 の付値は定義されません")
    k, v = abs(k), 0
    while k % q == 0:
        k //= q
        v += 1
    return v


# --- gcd / Bezout ---


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def gcd_bezout(a: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """g = gcd(a) と c·a = g を満たす整数ベクトル c.

    Args:
        a: 空でない整数ベクトル.

    Returns:
        (g, c). a = 0 なら (0, 0 ベクトル).
    """
    a = as_intvec(a)
    if not a:
        raise UsageError("gcd_bezout に空ベクトルが渡されました")
    g = 0
    c = [0] * len(a)
    for k, ak in enumerate(a):
        if ak == 0:
            continue
        g2, s, t = _ext_gcd(g, abs(ak))
        c = [x * s for x in c]
        c[k] = t * (1 if ak > 0 else -1)
        g = g2
    return g, tuple(c)


# --- 標準形 ---


@dataclass(frozen=True)
class NormalForm:
    """U·A·V = D (Smith) または U·A = D, V = I (Hermite)."""

    D: IntMat = field(compare=False)
    U: IntMat = field(compare=False)
    V: IntMat = field(compare=False)

    @property
    def diagonal(self) -> list[int]:
        return [int(self.D[i, i]) for i in range(min(self.D.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _swap_rows(M: IntMat, a: int, b: int) -> None:
    if a != b:
        M[[a, b]] = M[[b, a]]


def _swap_cols(M: IntMat, a: int, b: int) -> None:
    if a != b:
        M[:, [a, b]] = M[:, [b, a]]


def smith(A: Sequence[Sequence[int]] | IntMat) -> NormalForm:
    """Smith 標準形. U·A·V = D, D は対角で d1 | d2 | ..., 対角成分は非負."""
    D = as_intmat(A).copy()
    m, n = D.shape
    U, V = identity(m), identity(n)
    t = 0
    while t < min(m, n):
        nz = [
            (abs(D[i, j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if D[i, j] != 0
        ]
        if not nz:
            break
        _, i, j = min(nz)
        _swap_rows(D, t, i), _swap_rows(U, t, i)
        _swap_cols(D, t, j), _swap_cols(V, t, j)
        while True:
            dirty = False
            for i in range(t + 1, m):
                q = D[i, t] // D[t, t]
                if q:
                    D[i] = D[i] - q * D[t]
                    U[i] = U[i] - q * U[t]
                dirty = dirty or D[i, t] != 0
            for j in range(t + 1, n):
                q = D[t, j] // D[t, t]
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                dirty = dirty or D[t, j] != 0
            if dirty:
                # 剰余がピボットより小さくなったのでピボットを取り替える
                cand = [(abs(D[i, t]), i, t) for i in range(t + 1, m) if D[i, t] != 0]
                cand += [(abs(D[t, j]), t, j) for j in range(t + 1, n) if D[t, j] != 0]
                _, i, j = min(cand)
                if j == t:
                    _swap_rows(D, t, i), _swap_rows(U, t, i)
                else:
                    _swap_cols(D, t, j), _swap_cols(V, t, j)
                continue
            bad = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if D[i, j] % D[t, t] != 0
                ),
                None,
            )
            if bad is None:
                break
            # 整除性の修正: 行 bad を行 t に足して再び消去する
            D[t] = D[t] + D[bad]
            U[t] = U[t] + U[bad]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
        t += 1
    return NormalForm(D, U, V)


def hermite(A: Sequence[Sequence[int]] | IntMat) -> NormalForm:
    """行型 Hermite 標準形. U·A = D (階段形, ピボット正, ピボット上の成分は [0, pivot))."""
    H = as_intmat(A).copy()
    m, n = H.shape
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i, c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i, c]))
            _swap_rows(H, r, p), _swap_rows(U, r, p)
            clean = True
            for i in range(r + 1, m):
                q = H[i, c] // H[r, c]
                if q:
                    H[i] = H[i] - q * H[r]
                    U[i] = U[i] - q * U[r]
                clean = clean and H[i, c] == 0
            if clean:
                break
        if H[r, c] == 0:
            continue
        if H[r, c] < 0:
            H[r] = -H[r]
            U[r] = -U[r]
        for i in range(r):
            q = H[i, c] // H[r, c]
            if q:
                H[i] = H[i] - q * H[r]
                U[i] = U[i] - q * U[r]
        r += 1
    return NormalForm(H, U, identity(n))


def lattice_basis(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """整数ベクトル族が生成する格子の基底 (Hermite 形の非零行)."""
    if not vectors:
        return []
    H = hermite(vectors).D
    return [tuple(int(x) for x in row) for row in H if any(x != 0 for x in row)]


# --- Z / L(S) 上の可解性 ---


def _check_dims(A: IntMat, b: Sequence[int]) -> None:
    if A.shape[0] != len(b):
        raise UsageError(
            f"次元が一致しません: A は {A.shape[0]} 行, b は長さ {len(b)}"
        )


def _smith_reduced(A, b) -> tuple[NormalForm, list[int], IntMat]:
    A = as_intmat(A)
    b = as_intvec(b)
    _check_dims(A, b)
    nf = smith(A)
    c = [int(x) for x in np.dot(nf.U, np.array(b, dtype=object))]
    return nf, c, A


def solve_integer(A, b) -> tuple[int, ...] | None:
    """Ax = b の整数解を一つ返す (存在しなければ None)."""
    nf, c, A = _smith_reduced(A, b)
    d = nf.diagonal
    y = [0] * A.shape[1]
    for i, ci in enumerate(c):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if ci != 0:
                return None
        elif ci % di != 0:
            return None
        else:
            y[i] = ci // di
    return tuple(int(x) for x in np.dot(nf.V, np.array(y, dtype=object)))


def solve_in_L(A, b, L: LSpec) -> tuple[Rat, ...] | None:
    """Ax = b の L 値の解を一つ返す (存在しなければ None).

    Smith 形で U·b の各成分を d_i で割り、既約分母が S 数かを調べる。
    返す解の分母は S 数。
    """
    if L.is_integers:
        x = solve_integer(A, b)
        return None if x is None else tuple(Fraction(v) for v in x)
    nf, c, A = _smith_reduced(A, b)
    d = nf.diagonal
    y = [Fraction(0)] * A.shape[1]
    for i, ci in enumerate(c):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if ci != 0:
                return None
            continue
        if not L.divides_in_L(di, ci):
            return None
        y[i] = Fraction(ci, di)
    return tuple(
        sum((Fraction(nf.V[k, j]) * y[j] for j in range(len(y))), Fraction(0))
        for k in range(A.shape[1])
    )


def integer_parametrization(
    A, b
) -> tuple[tuple[int, ...], list[tuple[int, ...]]] | None:
    """Ax = b の整数解全体を x0 + Σ t_j K_j (t ∈ Z^k) で表す."""
    nf, c, A = _smith_reduced(A, b)
    x0 = solve_integer(A, b)
    if x0 is None:
        return None
    r = nf.rank
    n = A.shape[1]
    K = [tuple(int(nf.V[k, j]) for k in range(n)) for j in range(r, n)]
    return x0, K


class Solvability(NamedTuple):
    """単一方程式 a·u = c の L 上の可解性と証人."""

    ok: bool
    witness: tuple[Rat, ...] | None = None


def single_eq_solvable_in_L(a: Sequence[int], c: int, L: LSpec) -> Solvability:
    """a·u = c が L 上で解けるか. S 外の素数 q で v_q(gcd a) <= v_q(c) と同値."""
    a = as_intvec(a)
    g, coeffs = gcd_bezout(a)
    if g == 0:
        if c == 0:
            return Solvability(True, tuple(Fraction(0) for _ in a))
        return Solvability(False)
    if not L.divides_in_L(g, int(c)):
        return Solvability(False)
    q = Fraction(int(c), g)
    return Solvability(True, tuple(q * x for x in coeffs))


# --- 有理数の行簡約 ---


def rref(rows: Sequence[Sequence[Rat | int]]) -> tuple[list[list[Rat]], list[int]]:
    """既約行階段形とピボット列."""
    R = [[Fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    if not R:
        return R, pivots
    m, n = len(R), len(R[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        R[r] = [v / pv for v in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(rows: Sequence[Sequence[Rat | int]]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence[Rat | int]], n: int) -> list[tuple[Rat, ...]]:
    """{x ∈ Q^n : rows·x = 0} の基底."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    R, pivots = rref(rows)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(tuple(x))
    return basis


def solve_rational(
    rows: Sequence[Sequence[Rat | int]], rhs: Sequence[Rat | int], n: int
) -> tuple[Rat, ...] | None:
    """rows·x = rhs の有理数解を一つ (自由変数 0)."""
    if not rows:
        return tuple(Fraction(0) for _ in range(n))
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = R[i][n]
    return tuple(x)


# --- 生成集合の判定 ---


def is_Z_GSS(A, orientation: str = "rows") -> bool:
    """行 (または列) ベクトル族が張る部分空間の Z 生成集合か.

    Smith 形の非零単因子がすべて 1 であることと同値。
    """
    M = as_intmat(A)
    if orientation == "columns":
        M = M.T.copy()
    elif orientation != "rows":
        raise UsageError(f"orientation は rows か columns: {orientation!r}")
    return all(d in (0, 1) for d in smith(M).diagonal)


@dataclass(frozen=True)
class GscResult:
    """GSC 判定の結果と根拠."""

    holds: bool
    counterexample: tuple[int, ...] | None = None
    multiplier_bound: int = 0
    points_checked: int = 0
    lineality_rank: int = 0


class _ConeData(NamedTuple):
    pointed: list[tuple[int, ...]]  # 直線成分に属さない生成元
    lattice: list[tuple[int, ...]]  # 直線成分の格子基底 (±で使う)
    functional: tuple[Rat, ...]  # pointed 側で >= 1, lattice 上で 0
    generators: list[tuple[int, ...]]  # 錐の生成元 (元の行)


def _cone_data(A) -> _ConeData:
    M = as_intmat(A)
    gens = [tuple(int(x) for x in row) for row in M if any(x != 0 for x in row)]
    if len(gens) > config.GENERATOR_CAP:
        raise ResourceLimitError("DUALCERT_GENERATOR_CAP", len(gens), config.GENERATOR_CAP)
    n = M.shape[1]
    lineal = [g for g in gens if in_cone(gens, [-x for x in g])]
    pointed = [g for g in gens if g not in lineal]
    lattice = lattice_basis(lineal)
    # c·g >= 1 (pointed), c·h = 0 (lattice) を満たす汎関数
    rows = [[-x for x in g] for g in pointed]
    rhs = [-1] * len(pointed)
    for h in lattice:
        rows += [list(h), [-x for x in h]]
        rhs += [0, 0]
    c = feasible_point(rows, rhs, n) if rows else tuple(Fraction(0) for _ in range(n))
    if c is None:
        raise UsageError("錐の直線成分の分離に失敗しました")
    return _ConeData(pointed, lattice, c, gens)


def _zonotope_points(data: _ConeData, n: int) -> Iterable[tuple[int, ...]]:
    """半開ゾノトープを含む整数ボックスの点を辞書順に列挙する."""
    gens = data.pointed + data.lattice
    lo = [sum(min(0, g[k]) for g in gens) for k in range(n)]
    hi = [sum(max(0, g[k]) for g in gens) for k in range(n)]
    size = 1
    for a, b in zip(lo, hi):
        size *= b - a + 1
    if size > config.ZONOTOPE_CAP:
        raise ResourceLimitError("DUALCERT_ZONOTOPE_CAP", size, config.ZONOTOPE_CAP)
    return itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))


def _in_lattice(lattice: list[tuple[int, ...]], r: Sequence[int]) -> bool:
    if not lattice:
        return all(x == 0 for x in r)
    return solve_integer(np.array(lattice, dtype=object).T.copy(), list(r)) is not None


def _integer_representable(data: _ConeData, z: tuple[int, ...]) -> bool:
    """z が生成元の非負整数結合か (汎関数で乗数を有界にして探索)."""
    c = data.functional
    weights = [sum((ci * gi for ci, gi in zip(c, g)), Fraction(0)) for g in data.pointed]
    budget = sum((ci * zi for ci, zi in zip(c, z)), Fraction(0))

    def dfs(k: int, residual: tuple[int, ...], left: Rat) -> bool:
        if k == len(data.pointed):
            return left == 0 and _in_lattice(data.lattice, residual)
        g, wg = data.pointed[k], weights[k]
        mult = 0
        while mult * wg <= left:
            r = tuple(x - mult * y for x, y in zip(residual, g))
            if dfs(k + 1, r, left - mult * wg):
                return True
            mult += 1
        return False

    return budget >= 0 and dfs(0, z, budget)


def _multiplier_bound(data: _ConeData, z: Sequence[int]) -> int:
    val = sum((ci * zi for ci, zi in zip(data.functional, z)), Fraction(0))
    return max(0, ceil(val))


def is_Z_GSC(A) -> GscResult:
    """行が Hilbert 錐 (Z-GSC) を成すか. 失敗時は辞書順最小の反例を返す.

    直線成分を含む錐はその格子基底と符号反転を生成元に加えて扱う。
    """
    M = as_intmat(A)
    n = M.shape[1]
    data = _cone_data(M)
    if not data.generators:
        return GscResult(True)
    checked, bound = 0, 0
    for z in _zonotope_points(data, n):
        if not in_cone(data.generators, z):
            continue
        checked += 1
        bound = max(bound, _multiplier_bound(data, z))
        if not _integer_representable(data, z):
            logger.debug("Z-GSC 反例 %s", z)
            return GscResult(False, z, bound, checked, len(data.lattice))
    return GscResult(True, None, bound, checked, len(data.lattice))


def _L_representable(data: _ConeData, z: tuple[int, ...], L: LSpec) -> bool:
    """P_z = {y >= 0 : Gᵀy = z} のアフィン包が L 点を含むか."""
    gens = data.pointed + data.lattice + [tuple(-x for x in h) for h in data.lattice]
    k, n = len(gens), len(z)
    # y >= 0, Gᵀy = z を不等式で表す
    rows = [[gens[j][i] for j in range(k)] for i in range(n)]
    rows += [[-gens[j][i] for j in range(k)] for i in range(n)]
    rhs = list(z) + [-x for x in z]
    for j in range(k):
        e = [0] * k
        e[j] = -1
        rows.append(e)
        rhs.append(0)
    forced = []
    for j in range(k):
        obj = [0] * k
        obj[j] = 1
        out = maximize(rows, rhs, obj)
        if not out.is_optimal:
            if out.status is LpStatus.INFEASIBLE:
                return False
            continue
        if out.value == 0:
            forced.append(j)
    eq_rows = [[gens[j][i] for j in range(k)] for i in range(n)]
    eq_rhs = list(z)
    for j in forced:
        e = [0] * k
        e[j] = 1
        eq_rows.append(e)
        eq_rhs.append(0)
    return solve_in_L(eq_rows, eq_rhs, L) is not None


def is_L_GSC(A, L: LSpec) -> GscResult:
    """行が L-GSC を成すか (L = L(S), S 有限)."""
    if L.is_integers:
        raise UsageError("Z には is_Z_GSC を使ってください (Z は heavy ではありません)")
    fast = is_Z_GSC(A)
    if fast.holds:
        return fast
    M = as_intmat(A)
    data = _cone_data(M)
    checked, bound = 0, 0
    for z in _zonotope_points(data, M.shape[1]):
        if not in_cone(data.generators, z):
            continue
        checked += 1
        bound = max(bound, _multiplier_bound(data, z))
        if not _L_representable(data, z, L):
            return GscResult(False, z, bound, checked, len(data.lattice))
    return GscResult(True, None, bound, checked, len(data.lattice))
