"""Pure-Python column reduction over the integers (exact rank over Q).

Reference implementation of the kernel in ``_reduce.pyx``; selected at import
when the compiled extension is unavailable, and used by the compiled kernel
as its overflow fallback.
"""
from math import gcd


def _content(col, v):
    g = 0
    for x in col.values():
        g = gcd(g, x)
        if g == 1:
            return 1
    if v is not None:
        for x in v.values():
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


def reduce_columns(columns, cleared=None, track=False):
    """Left-to-right pivot reduction of an integer sparse matrix.

    Parameters
    ----------
    columns : sequence of (rows, vals)
        Column ``j`` has nonzero integer ``vals`` at ``rows``.
    cleared : sequence of bool, optional
        Columns known in advance to reduce to zero; skipped entirely.
    track : bool
        Record the column operations. For every non-cleared column that
        reduces to zero the combination is returned as a kernel vector.

    Returns
    -------
    pivots : list of int
        Pivot row (largest row index) of each reduced column, -1 if zero.
    reduced : list of dict or None
        Reduced columns ``{row: value}``; distinct nonzero columns have
        distinct pivots.
    kernel : dict
        ``{j: {col: coeff}}`` for non-cleared columns reducing to zero
        (only when ``track``).
    """
    n = len(columns)
    owner = {}
    reduced = [None] * n
    ops = [None] * n
    pivots = [-1] * n
    kernel = {}
    for j in range(n):
        if cleared is not None and cleared[j]:
            continue
        rows, vals = columns[j]
        col = {r: int(x) for r, x in zip(rows, vals) if x}
        v = {j: 1} if track else None
        while col:
            p = max(col)
            i = owner.get(p)
            if i is None:
                break
            other = reduced[i]
            a = col[p]
            b = other[p]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            if fa < 0:
                fa, fb = -fa, -fb
            if fa != 1:
                for r in col:
                    col[r] *= fa
                if track:
                    for r in v:
                        v[r] *= fa
            for r, x in other.items():
                y = col.get(r, 0) - fb * x
                if y:
                    col[r] = y
                else:
                    del col[r]
            if track:
                for r, x in ops[i].items():
                    y = v.get(r, 0) - fb * x
                    if y:
                        v[r] = y
                    else:
                        del v[r]
            if fa != 1 and col:
                g = _content(col, v)
                if g > 1:
                    for r in col:
                        col[r] //= g
                    if track:
                        for r in v:
                            v[r] //= g
        if col:
            p = max(col)
            owner[p] = j
            reduced[j] = col
            pivots[j] = p
            if track:
                ops[j] = v
        elif track:
            g = _content({}, v)
            if g > 1:
                v = {r: x // g for r, x in v.items()}
            kernel[j] = v
    return pivots, reduced, kernel
