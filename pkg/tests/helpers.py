"""Shared builders for tests: relabelled and randomized manifold pairs."""
import numpy as np

from acmoduli import generators
from acmoduli.simplicial import build_complex, extract_pair


def oriented_top(pair):
    out = []
    for s, g in zip(pair.total.top, pair.top_orientation):
        out.append(s if g > 0 else (s[1], s[0]) + s[2:])
    return out


def relabel(pair, rng):
    """Same pair with vertex ids permuted and shifted; orientation carried over."""
    verts = pair.total.vertices
    ids = rng.permutation(len(verts)) + int(rng.integers(0, 5))
    new = dict(zip(verts, (int(i) for i in ids)))
    X = build_complex([tuple(new[v] for v in s) for s in oriented_top(pair)])
    return extract_pair(X, orientation_hint=X.top_signs(), name=pair.name)


def kuhn_pair(cells, periodic, drop_vertex=None):
    paths, signs, _ = generators.kuhn_grid(cells, periodic)
    keep = [(p, s) for p, s in zip(paths, signs) if drop_vertex is None or drop_vertex not in p]
    X = build_complex([p for p, _ in keep], [s for _, s in keep])
    return extract_pair(X, name=f"kuhn{tuple(cells)}{tuple(periodic)}")


def random_pair(seed):
    """A small valid compact oriented 4-manifold with nonempty boundary.

    Products of intervals and circles (at least one interval, or a closed
    torus with one vertex star removed), randomly relabelled.
    """
    rng = np.random.default_rng(seed)
    kind = rng.integers(0, 3)
    if kind == 2:
        n_int = 0
    else:
        n_int = int(rng.integers(1, 5))
    periodic = [False] * n_int + [True] * (4 - n_int)
    rng.shuffle(periodic)
    cells = [3 if p else int(rng.integers(1, 3)) for p in periodic]
    drop = 0 if n_int == 0 else None
    pair = kuhn_pair(cells, periodic, drop)
    return relabel(pair, rng)
