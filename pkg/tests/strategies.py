"""hypothesis の生成戦略."""

from hypothesis import strategies as st

from polyhedron import LinearSystem

BOX = 4


def _box_rows(n: int) -> tuple[list[list[int]], list[int]]:
    rows, rhs = [], []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        rows += [e, [-v for v in e]]
        rhs += [BOX, 0]
    return rows, rhs


@st.composite
def bounded_systems(draw, n: int = 2, max_extra: int = 3) -> LinearSystem:
    """[0, 4]^n に追加の行を加えた全次元ポリトープ (右辺 >= 1 なので原点の近くに内点がある)."""
    k = draw(st.integers(min_value=0, max_value=max_extra))
    rows, rhs = _box_rows(n)
    for _ in range(k):
        row = draw(
            st.lists(st.integers(-3, 3), min_size=n, max_size=n).filter(
                lambda r: any(r)
            )
        )
        rows.append(row)
        rhs.append(draw(st.integers(1, 6)))
    return LinearSystem.of(rows, rhs)


def int_matrices(rows: int, cols: int, bound: int) -> st.SearchStrategy[list[list[int]]]:
    return st.lists(
        st.lists(st.integers(-bound, bound), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    )


def weights(n: int, bound: int = 3) -> st.SearchStrategy[tuple[int, ...]]:
    return st.tuples(*[st.integers(-bound, bound) for _ in range(n)])


@st.composite
def small_systems(draw, n: int = 2, max_rows: int = 4) -> LinearSystem:
    """原点を含む小さな系 (非有界でもよい)."""
    m = draw(st.integers(min_value=1, max_value=max_rows))
    rows = [
        draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n).filter(lambda r: any(r)))
        for _ in range(m)
    ]
    rhs = [draw(st.integers(0, 4)) for _ in range(m)]
    return LinearSystem.of(rows, rhs)
