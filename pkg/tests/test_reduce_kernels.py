import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from acmoduli import _reduce_py, exact, generators
from acmoduli.simplicial import boundary_matrix

cython = pytest.importorskip("acmoduli._reduce")


@st.composite
def int_columns(draw, max_rows=12, max_cols=12, bound=5):
    nrows = draw(st.integers(1, max_rows))
    ncols = draw(st.integers(1, max_cols))
    cols = []
    for _ in range(ncols):
        entries = draw(st.dictionaries(st.integers(0, nrows - 1),
                                       st.integers(-bound, bound), max_size=nrows))
        rows = sorted(entries)
        cols.append((rows, [entries[r] for r in rows]))
    return nrows, cols


def dense(nrows, cols):
    A = np.zeros((nrows, len(cols)), dtype=object)
    for j, (rows, vals) in enumerate(cols):
        for r, x in zip(rows, vals):
            A[r, j] = x
    return A


@settings(max_examples=200, deadline=None)
@given(int_columns(), st.booleans())
def test_backends_identical(data, track):
    _, cols = data
    assert cython.reduce_columns(cols, None, track) == _reduce_py.reduce_columns(cols, None, track)


@settings(max_examples=100, deadline=None)
@given(int_columns())
def test_rank_and_kernel_against_sympy(data):
    nrows, cols = data
    A = dense(nrows, cols)
    pivots, reduced, kernel = exact.reduce_columns(cols, track=True)
    rank = sum(p >= 0 for p in pivots)
    assert rank == sympy.Matrix(A.tolist()).rank()
    assert len(kernel) == len(cols) - rank
    for j, comb in kernel.items():
        x = np.zeros(len(cols), dtype=object)
        for c, v in comb.items():
            x[c] = v
        assert x[j] != 0
        assert not np.any(A.dot(x))
    piv = [p for p in pivots if p >= 0]
    assert len(piv) == len(set(piv))


@settings(max_examples=50, deadline=None)
@given(int_columns(), st.data())
def test_cleared_columns_skipped(data, draw):
    _, cols = data
    cleared = draw.draw(st.lists(st.booleans(), min_size=len(cols), max_size=len(cols)))
    a = cython.reduce_columns(cols, cleared, True)
    assert a == _reduce_py.reduce_columns(cols, cleared, True)
    assert all(a[0][j] == -1 for j in range(len(cols)) if cleared[j])


def test_overflow_falls_back_to_python():
    big = 2 ** 40
    cols = [([0, 1], [big, 3]), ([0, 1], [5, big + 1]), ([0, 1], [7, 11])]
    with pytest.raises(OverflowError):
        cython.reduce_columns(cols, None, True)
    got = exact.reduce_columns(cols, track=True, backend="cython")
    assert got == _reduce_py.reduce_columns(cols, None, True)
    assert sum(p >= 0 for p in got[0]) == 2


def test_growth_overflow_falls_back():
    # entries fit but products of pivots do not
    m = 2 ** 30 + 3
    cols = [([0, 1, 2], [m, 1, 0]), ([0, 1, 2], [m - 2, 0, 1]), ([0, 1, 2], [1, m - 4, m])]
    got = exact.reduce_columns(cols, track=True, backend="cython")
    assert got == _reduce_py.reduce_columns(cols, None, True)


@pytest.mark.parametrize("name", ["cp2_minus_ball", "t4_minus_ball"])
def test_boundary_ranks_agree(name):
    X = generators.generate_mesh(name).total
    for k in range(1, X.dim + 1):
        cols = boundary_matrix(X, k).integer_columns()
        assert cython.reduce_columns(cols, None, False) == _reduce_py.reduce_columns(cols, None, False)


def test_unknown_backend_without_extension(monkeypatch):
    monkeypatch.setattr(exact, "_reduce_c", None)
    with pytest.raises(RuntimeError):
        exact.reduce_columns([([0], [1])], backend="cython")
    assert exact.reduce_columns([([0], [1])], backend="python")[0] == [0]
