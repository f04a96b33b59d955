"""Exact sparse linear algebra over Q.

All topology in this package runs through :func:`reduce_columns`, a
fraction-free pivot reduction on integer columns. A compiled kernel is used
when the extension ``acmoduli._reduce`` was built; otherwise the pure-Python
reference kernel is used. Both give identical results.
"""
from fractions import Fraction
from math import gcd, lcm

from . import _reduce_py

try:  # pragma: no cover - depends on build
    from . import _reduce as _reduce_c
except ImportError:  # pragma: no cover
    _reduce_c = None

BACKEND = "cython" if _reduce_c is not None else "python"


def reduce_columns(columns, cleared=None, track=False, backend=None):
    """Dispatch to the selected kernel; see ``_reduce_py.reduce_columns``."""
    backend = backend or BACKEND
    if backend == "cython":
        if _reduce_c is None:
            raise RuntimeError("compiled kernel not available")
        try:
            return _reduce_c.reduce_columns(columns, cleared, track)
        except OverflowError:
            # int64 intermediate growth; redo with Python big integers
            pass
    return _reduce_py.reduce_columns(columns, cleared, track)


def integerize(values):
    """Scale a sequence of rationals to coprime integers (sign preserved)."""
    den = 1
    for x in values:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in values]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


class RationalMatrix:
    """Sparse matrix with exact rational entries, stored by columns."""

    def __init__(self, rows, cols, columns=None):
        self.rows = int(rows)
        self.cols = int(cols)
        if columns is None:
            columns = [{} for _ in range(self.cols)]
        if len(columns) != self.cols:
            raise ValueError("column count does not match shape")
        self.columns = []
        for c in columns:
            d = {}
            for r, x in c.items():
                if not 0 <= r < self.rows:
                    raise IndexError(f"row {r} out of range")
                x = Fraction(x)
                if x:
                    d[r] = x
            self.columns.append(d)

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if m else 0
        cols = [{i: rows[i][j] for i in range(m) if rows[i][j]} for j in range(n)]
        return cls(m, n, cols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, key):
        i, j = key
        return self.columns[j].get(i, Fraction(0))

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, x in c.items():
                out[i][j] = x
        return out

    def transpose(self):
        cols = [{} for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, x in c.items():
                cols[i][j] = x
        return RationalMatrix(self.cols, self.rows, cols)

    T = property(transpose)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for c in other.columns:
            acc = {}
            for k, y in c.items():
                for i, x in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + x * y
            out.append({i: x for i, x in acc.items() if x})
        return RationalMatrix(self.rows, other.cols, out)

    def __eq__(self, other):
        return (
            isinstance(other, RationalMatrix)
            and self.shape == other.shape
            and self.columns == other.columns
        )

    def is_zero(self):
        return not any(self.columns)

    def nnz(self):
        return sum(len(c) for c in self.columns)

    def integer_columns(self):
        """Columns rescaled to primitive integer vectors (same column space)."""
        out = []
        for c in self.columns:
            rows = sorted(c)
            out.append((rows, integerize([c[r] for r in rows]) if rows else []))
        return out

    def rank(self, backend=None):
        pivots, _, _ = reduce_columns(self.integer_columns(), backend=backend)
        return sum(1 for p in pivots if p >= 0)

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


class Echelon:
    """Incrementally built subspace of Q^n with one pivot per basis vector.

    Vectors are ``{index: int}`` dicts. ``add`` returns whether the vector was
    independent of the current span.
    """

    def __init__(self, basis=None):
        self._by_pivot = {}
        if basis:
            for v in basis:
                self.add(v)

    def copy(self):
        e = Echelon()
        e._by_pivot = dict(self._by_pivot)
        return e

    @classmethod
    def from_reduction(cls, reduced):
        """Adopt the nonzero columns of a ``reduce_columns`` result."""
        e = cls()
        for col in reduced:
            if col:
                e._by_pivot[max(col)] = col
        return e

    def __len__(self):
        return len(self._by_pivot)

    def reduce(self, vec):
        keys = [r for r, x in vec.items() if x]
        vals = [vec[r] for r in keys]
        if not all(isinstance(x, int) for x in vals):
            vals = integerize(vals)
        col = dict(zip(keys, vals))
        while col:
            p = max(col)
            w = self._by_pivot.get(p)
            if w is None:
                break
            a, b = col[p], w[p]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            if fa < 0:
                fa, fb = -fa, -fb
            if fa != 1:
                col = {r: x * fa for r, x in col.items()}
            for r, x in w.items():
                y = col.get(r, 0) - fb * x
                if y:
                    col[r] = y
                else:
                    col.pop(r, None)
        return col

    def contains(self, vec):
        return not self.reduce(vec)

    def add(self, vec):
        res = self.reduce(vec)
        if not res:
            return False
        self._by_pivot[max(res)] = res
        return True
