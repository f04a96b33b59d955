# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled column reduction over the integers.

Same algorithm and same normalisations as ``_reduce_py.reduce_columns``, so
both return identical pivots, reduced columns and kernel vectors. Columns
are kept as row-sorted vectors of int64 entries; any intermediate value
that could leave the int64 range raises OverflowError and the caller falls
back to the big-integer implementation.
"""
from libc.stdint cimport int64_t
from libcpp.vector cimport vector

ctypedef struct Entry:
    int64_t row
    int64_t val

# operands are kept below 2^31 so that fa * x - fb * y stays inside int64
cdef int64_t LIMIT = 2147483647


cdef inline int64_t _abs(int64_t x) nogil:
    return -x if x < 0 else x


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    a = _abs(a)
    b = _abs(b)
    while b:
        a, b = b, a % b
    return a


cdef int _check(int64_t x) except -1:
    if _abs(x) > LIMIT:
        raise OverflowError("entry exceeds the int64 kernel range")
    return 0


cdef int _combine(vector[Entry]& out, vector[Entry]& a, int64_t fa,
                  vector[Entry]& b, int64_t fb) except -1:
    """out = fa * a - fb * b, row sorted, zeros dropped."""
    cdef size_t i = 0, j = 0
    cdef Entry e
    cdef int64_t x
    _check(fa)
    _check(fb)
    out.clear()
    while i < a.size() or j < b.size():
        if j == b.size() or (i < a.size() and a[i].row < b[j].row):
            _check(a[i].val)
            e.row = a[i].row
            e.val = fa * a[i].val
            i += 1
        elif i == a.size() or b[j].row < a[i].row:
            _check(b[j].val)
            e.row = b[j].row
            e.val = -fb * b[j].val
            j += 1
        else:
            _check(a[i].val)
            _check(b[j].val)
            e.row = a[i].row
            e.val = fa * a[i].val - fb * b[j].val
            i += 1
            j += 1
        if e.val != 0:
            out.push_back(e)
    return 0


cdef int64_t _content(vector[Entry]& c, vector[Entry]& v, bint track):
    cdef int64_t g = 0
    cdef size_t i
    for i in range(c.size()):
        g = _gcd(g, c[i].val)
        if g == 1:
            return 1
    if track:
        for i in range(v.size()):
            g = _gcd(g, v[i].val)
            if g == 1:
                return 1
    return g


cdef void _divide(vector[Entry]& c, int64_t g):
    cdef size_t i
    for i in range(c.size()):
        c[i].val = c[i].val // g


cdef dict _as_dict(vector[Entry]& c):
    cdef size_t i
    return {int(c[i].row): int(c[i].val) for i in range(c.size())}


def reduce_columns(columns, cleared=None, track=False):
    """See ``_reduce_py.reduce_columns``."""
    cdef Py_ssize_t n = len(columns), j
    cdef int64_t nrows = 0, p, a, b, g, fa, fb, i
    cdef vector[vector[Entry]] reduced
    cdef vector[vector[Entry]] ops
    cdef vector[int64_t] owner
    cdef vector[Entry] col, v, tmp
    cdef Entry e
    cdef bint tr = bool(track)
    pivots = [-1] * n
    kernel = {}
    for rows, vals in columns:
        for r in rows:
            if r + 1 > nrows:
                nrows = r + 1
    owner.assign(nrows, -1)
    reduced.resize(n)
    if tr:
        ops.resize(n)
    for j in range(n):
        if cleared is not None and cleared[j]:
            continue
        rows, vals = columns[j]
        pairs = sorted((int(r), int(x)) for r, x in zip(rows, vals) if x)
        col.clear()
        for r, x in pairs:
            _check(x)
            e.row = r
            e.val = x
            col.push_back(e)
        v.clear()
        if tr:
            e.row = j
            e.val = 1
            v.push_back(e)
        while col.size():
            p = col.back().row
            i = owner[p]
            if i < 0:
                break
            a = col.back().val
            b = reduced[i].back().val
            g = _gcd(a, b)
            fa = b // g
            fb = a // g
            if fa < 0:
                fa = -fa
                fb = -fb
            _combine(tmp, col, fa, reduced[i], fb)
            col.swap(tmp)
            if tr:
                _combine(tmp, v, fa, ops[i], fb)
                v.swap(tmp)
            if fa != 1 and col.size():
                g = _content(col, v, tr)
                if g > 1:
                    _divide(col, g)
                    if tr:
                        _divide(v, g)
        if col.size():
            p = col.back().row
            owner[p] = j
            reduced[j] = col
            pivots[j] = p
            if tr:
                ops[j] = v
        elif tr:
            g = _content(col, v, True)
            if g > 1:
                _divide(v, g)
            kernel[j] = _as_dict(v)
    out = [None] * n
    for j in range(n):
        if reduced[j].size():
            out[j] = _as_dict(reduced[j])
    return pivots, out, kernel
