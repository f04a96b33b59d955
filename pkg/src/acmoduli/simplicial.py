"""Combinatorial simplicial complexes, manifold pairs and piecewise-flat meshes.

Simplices are stored as ascending vertex tuples; the global vertex order
fixes every orientation sign and the cup product. Orientation of top
simplices relative to the order in which they were supplied is kept as a
separate sign.
"""
from collections import defaultdict, deque
from itertools import combinations

import numpy as np

from .errors import (
    ClosedComponent,
    ComplexError,
    DegenerateTetrahedron,
    DuplicateSimplex,
    NonOrientable,
    NotPseudomanifold,
    RepeatedVertexInSimplex,
)
from .exact import RationalMatrix

MAX_DIM = 4


def permutation_sign(seq):
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under faces.

    Attributes
    ----------
    dim : int
    simplices : tuple of tuple
        ``simplices[k]`` lists the k-simplices as ascending vertex tuples in
        lexicographic order.
    signs : dict
        Orientation of supplied simplices relative to their ascending tuple
        (only simplices that were supplied with an order; default +1).
    """

    def __init__(self, simplices, signs=None):
        self.simplices = tuple(tuple(level) for level in simplices)
        self.dim = len(self.simplices) - 1
        self._index = [
            {s: i for i, s in enumerate(level)} for level in self.simplices
        ]
        self.signs = dict(signs or {})

    @property
    def vertices(self):
        return tuple(s[0] for s in self.simplices[0]) if self.simplices else ()

    @property
    def vertex_count(self):
        return len(self.simplices[0]) if self.simplices else 0

    @property
    def f_vector(self):
        return tuple(len(level) for level in self.simplices)

    @property
    def top(self):
        return self.simplices[self.dim]

    def index(self, simplex):
        return self._index[len(simplex) - 1][simplex]

    def indices(self, k):
        return self._index[k]

    def __contains__(self, simplex):
        k = len(simplex) - 1
        return 0 <= k <= self.dim and tuple(simplex) in self._index[k]

    def sign(self, simplex):
        return self.signs.get(simplex, 1)

    def top_signs(self):
        return np.array([self.sign(s) for s in self.top], dtype=int)

    def oriented(self, simplex):
        """Vertex tuple of ``simplex`` listed in its stored orientation."""
        if self.sign(simplex) > 0 or len(simplex) < 2:
            return simplex
        return (simplex[1], simplex[0]) + simplex[2:]

    def euler_characteristic(self):
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def __eq__(self, other):
        return (
            isinstance(other, SimplicialComplex)
            and self.simplices == other.simplices
            and {s: self.sign(s) for s in self.top}
            == {s: other.sign(s) for s in other.top}
        )

    def __repr__(self):
        return f"SimplicialComplex(dim={self.dim}, f={self.f_vector})"


def build_complex(simplex_list, signs=None):
    """Close a list of vertex tuples under faces.

    The orientation of each supplied tuple relative to its sorted form is
    recorded, so ``(1, 0, 2)`` and ``(0, 1, 2)`` describe opposite
    orientations of the same triangle. ``signs`` optionally multiplies those.
    """
    seen = {}
    for n, raw in enumerate(simplex_list):
        s = tuple(raw)
        if not s:
            raise ComplexError("empty simplex")
        for v in s:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ComplexError(f"vertex ids must be nonnegative integers: {s}")
        if len(set(s)) != len(s):
            raise RepeatedVertexInSimplex(f"repeated vertex in simplex {s}")
        if len(s) - 1 > MAX_DIM:
            raise ComplexError(f"simplex {s} exceeds dimension {MAX_DIM}")
        key = tuple(sorted(int(v) for v in s))
        if key in seen:
            raise DuplicateSimplex(f"simplex {key} listed twice")
        sign = permutation_sign(s)
        if signs is not None:
            sign *= int(signs[n])
        seen[key] = sign
    if not seen:
        raise ComplexError("no simplices given")
    dim = max(len(s) for s in seen) - 1
    levels = [set() for _ in range(dim + 1)]
    for s in seen:
        for k in range(len(s)):
            levels[k].update(combinations(s, k + 1))
    simplices = [sorted(level) for level in levels]
    stored = {s: g for s, g in seen.items() if g != 1}
    return SimplicialComplex(simplices, stored)


def boundary_matrix(X, k):
    """Matrix of the simplicial boundary map from k-chains to (k-1)-chains."""
    if not 1 <= k <= X.dim:
        raise ValueError(f"boundary degree {k} out of range 1..{X.dim}")
    faces = X.indices(k - 1)
    cols = []
    for s in X.simplices[k]:
        cols.append({faces[s[:i] + s[i + 1:]]: (-1) ** i for i in range(len(s))})
    return RationalMatrix(len(X.simplices[k - 1]), len(X.simplices[k]), cols)


def coboundary_columns(X, k, keep=None):
    """Integer columns of the coboundary from k-cochains to (k+1)-cochains.

    Column ``a`` is the coboundary of the dual cochain of the a-th k-simplex.
    If ``keep`` is given (a set of simplices) both rows and columns are
    restricted to it and reindexed in the induced order; the index lists are
    returned alongside.
    """
    ks = X.simplices[k]
    up = X.simplices[k + 1] if k + 1 <= X.dim else ()
    if keep is not None:
        ks = [s for s in ks if s in keep]
        up = [s for s in up if s in keep]
    col_index = {s: i for i, s in enumerate(ks)}
    cols = [([], []) for _ in ks]
    for b, t in enumerate(up):
        for i in range(len(t)):
            a = col_index.get(t[:i] + t[i + 1:])
            if a is not None:
                cols[a][0].append(b)
                cols[a][1].append((-1) ** i)
    return cols, list(ks), list(up)


def signed_boundary_chain(X, signs):
    """Boundary of the chain sum(signs[i] * top[i]) as ``{face: coeff}``."""
    out = defaultdict(int)
    for s, g in zip(X.top, signs):
        for i in range(len(s)):
            out[s[:i] + s[i + 1:]] += g * (-1) ** i
    return {f: c for f, c in out.items() if c}


def _orient(X, seed_signs=None, hint=None):
    """Coherent orientation of a pure complex across codimension-1 faces.

    Returns signs per top simplex. Raises ``NotPseudomanifold`` if a
    codimension-1 face lies in more than two top simplices and
    ``NonOrientable`` if no coherent assignment exists.
    """
    d = X.dim
    top = X.top
    face_to = defaultdict(list)
    for n, s in enumerate(top):
        for i in range(d + 1):
            face_to[s[:i] + s[i + 1:]].append((n, (-1) ** i))
    for f, users in face_to.items():
        if len(users) > 2:
            raise NotPseudomanifold(f"face {f} lies in {len(users)} {d}-simplices")
    if hint is not None:
        signs = np.asarray(hint, dtype=int)
        if signs.shape != (len(top),) or not np.all(np.abs(signs) == 1):
            raise ComplexError("orientation hint must be one sign per top simplex")
        for f, users in face_to.items():
            if len(users) == 2:
                (a, ea), (b, eb) = users
                if signs[a] * ea + signs[b] * eb != 0:
                    raise NonOrientable(f"hint is not coherent across face {f}")
        return signs
    signs = np.zeros(len(top), dtype=int)
    for start in range(len(top)):
        if signs[start]:
            continue
        signs[start] = seed_signs[start] if seed_signs is not None else 1
        queue = deque([start])
        while queue:
            n = queue.popleft()
            s = top[n]
            for i in range(d + 1):
                users = face_to[s[:i] + s[i + 1:]]
                if len(users) != 2:
                    continue
                (a, ea), (b, eb) = users
                m, em, en = (b, eb, ea) if a == n else (a, ea, eb)
                want = -signs[n] * en * em
                if signs[m] == 0:
                    signs[m] = want
                    queue.append(m)
                elif signs[m] != want:
                    raise NonOrientable(
                        f"incoherent orientation across face {s[:i] + s[i + 1:]}"
                    )
    return signs


def _components(X):
    """Connected components of top simplices (adjacency through vertices)."""
    parent = {v: v for v in X.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in X.top:
        for v in s[1:]:
            ra, rb = find(s[0]), find(v)
            if ra != rb:
                parent[ra] = rb
    return [find(s[0]) for s in X.top]


class ManifoldPair:
    """Oriented compact 4-manifold ``total`` with boundary ``link``.

    ``top_orientation[i]`` orients ``total.top[i]`` relative to its ascending
    tuple. The link carries the boundary orientation with the outward normal
    placed last, so the signed boundary of the fundamental chain of
    ``total`` equals ``-1`` times the fundamental cycle of ``link`` (see
    ``LINK_BOUNDARY_SIGN``).
    """

    def __init__(self, total, link, top_orientation, name=None):
        self.total = total
        self.link = link
        self.top_orientation = np.asarray(top_orientation, dtype=int)
        self.name = name

    @property
    def inclusion(self):
        """Index of each link k-simplex inside ``total``'s k-simplices."""
        return [
            [self.total.index(s) for s in self.link.simplices[k]]
            for k in range(self.link.dim + 1)
        ]

    def link_signs(self):
        return self.link.top_signs()

    def fundamental_chain(self):
        return dict(zip(self.total.top, self.top_orientation.tolist()))

    def reversed(self):
        link = SimplicialComplex(
            self.link.simplices, {s: -self.link.sign(s) for s in self.link.top}
        )
        return ManifoldPair(self.total, link, -self.top_orientation, self.name)

    def __repr__(self):
        return f"ManifoldPair({self.name!r}, total={self.total.f_vector}, link={self.link.f_vector})"


# outward normal last: boundary orientation = -(algebraic boundary)
LINK_BOUNDARY_SIGN = -1


def extract_pair(total, orientation_hint=None, name=None):
    """Split a 4-complex into (total, boundary link) with orientations.

    ``orientation_hint`` may be a sign per 4-simplex; otherwise a coherent
    orientation is propagated from the supplied order of the first simplex
    in every connected component.
    """
    if total.dim != 4:
        raise ComplexError(f"expected a 4-dimensional complex, got dim {total.dim}")
    for k in range(4):
        covered = set()
        for s in total.simplices[k + 1]:
            for i in range(k + 2):
                covered.add(s[:i] + s[i + 1:])
        if len(covered) != len(total.simplices[k]):
            raise NotPseudomanifold(f"complex is not pure: stray {k}-simplices")
    seed = total.top_signs()
    signs = _orient(total, seed, orientation_hint)
    link_faces = {}
    counts = defaultdict(int)
    for n, s in enumerate(total.top):
        for i in range(5):
            f = s[:i] + s[i + 1:]
            counts[f] += 1
            link_faces[f] = LINK_BOUNDARY_SIGN * signs[n] * (-1) ** i
    boundary = sorted(f for f, c in counts.items() if c == 1)
    comp = _components(total)
    with_boundary = {comp[n] for n, s in enumerate(total.top)
                     if any(counts[s[:i] + s[i + 1:]] == 1 for i in range(5))}
    if set(comp) - with_boundary:
        raise ClosedComponent("a connected component has empty boundary")
    link_signs = [link_faces[f] for f in boundary]
    link = build_complex(boundary, signs=[1] * len(boundary))
    link = SimplicialComplex(link.simplices, dict(zip(boundary, link_signs)))
    tri_count = defaultdict(int)
    for t in boundary:
        for i in range(4):
            tri_count[t[:i] + t[i + 1:]] += 1
    bad = [f for f, c in tri_count.items() if c != 2]
    if bad:
        raise NotPseudomanifold(f"boundary is not closed at triangle {bad[0]}")
    return ManifoldPair(total, link, signs, name=name)


def orient_closed(X, seed=None):
    """Coherent orientation of a closed pseudomanifold (e.g. a 3-manifold)."""
    signs = _orient(X, seed if seed is not None else X.top_signs())
    counts = defaultdict(int)
    for s in X.top:
        for i in range(len(s)):
            counts[s[:i] + s[i + 1:]] += 1
    if any(c != 2 for c in counts.values()):
        raise NotPseudomanifold("complex is not closed")
    return signs


def barycentric_subdivision(pair):
    """Barycentric subdivision of a manifold pair, orientation preserved."""
    total = pair.total
    order = [s for level in total.simplices for s in level]
    vid = {s: i for i, s in enumerate(order)}
    new_top, new_signs = [], []
    for s, g in zip(total.top, pair.top_orientation):
        for perm in _permutations(len(s)):
            flag = tuple(vid[tuple(sorted(s[p] for p in perm[: m + 1]))]
                         for m in range(len(s)))
            new_top.append(flag)
            new_signs.append(int(g) * permutation_sign(perm))
    # build_complex folds the flag order into its stored sign; undo that
    X = build_complex(new_top)
    hint = []
    lookup = {tuple(sorted(t)): (t, g) for t, g in zip(new_top, new_signs)}
    for s in X.top:
        t, g = lookup[s]
        hint.append(g * permutation_sign(t))
    X = SimplicialComplex(X.simplices, {s: h for s, h in zip(X.top, hint) if h != 1})
    return extract_pair(X, orientation_hint=hint, name=pair.name)


def _permutations(n):
    from itertools import permutations

    return list(permutations(range(n)))


class GeometricMesh:
    """Closed 3-complex with vertex coordinates (piecewise-flat metric).

    Parameters
    ----------
    complex : SimplicialComplex
        Dimension 3, closed.
    coords : array (N, d)
        Row ``i`` is the point of vertex ``complex.vertices[i]``; d is 3 or 4.
    tets : sequence of tuples, optional
        Each tetrahedron listed in the vertex order used by refinement
        (defaults to ascending).
    orientation : array of +-1, optional
        Orientation of ``tets[i]`` as listed. Computed from the geometry if
        omitted (flat R^3, or outward-normal-last on a sphere).
    period : array (d,), optional
        Lattice periods of a flat torus; edge vectors use the minimal image.
    sphere_radius : float, optional
        New vertices are projected to this sphere on refinement.
    """

    def __init__(self, complex, coords, tets=None, orientation=None, period=None,
                 sphere_radius=None, level=0, name=None):
        if complex.dim != 3:
            raise ComplexError("a geometric mesh must be 3-dimensional")
        self.complex = complex
        self.coords = np.asarray(coords, dtype=float)
        if self.coords.shape[0] != complex.vertex_count or self.coords.shape[1] not in (3, 4):
            raise ComplexError("coords must be (vertex_count, 3 or 4)")
        self.period = None if period is None else np.asarray(period, dtype=float)
        self.sphere_radius = sphere_radius
        self.level = level
        self.name = name
        self.tets = [tuple(t) for t in (tets if tets is not None else complex.top)]
        if sorted(tuple(sorted(t)) for t in self.tets) != list(complex.top):
            raise ComplexError("tets do not match the complex")
        self._vpos = {v: i for i, v in enumerate(complex.vertices)}
        if orientation is None:
            orientation = self._geometric_orientation()
        self.orientation = np.asarray(orientation, dtype=int)
        self._validate()

    def vertex_rows(self, simplex):
        return [self._vpos[v] for v in simplex]

    def edge_vectors(self, tet):
        """Vectors from the first vertex of ``tet`` to the other three."""
        p = self.coords[self.vertex_rows(tet)]
        e = p[1:] - p[0]
        if self.period is not None:
            e = e - self.period * np.round(e / self.period)
        return e

    def _geometric_orientation(self):
        out = []
        for t in self.tets:
            e = self.edge_vectors(t)
            if self.coords.shape[1] == 3:
                det = np.linalg.det(e)
            elif self.sphere_radius is not None:
                n = self.coords[self.vertex_rows(t)].mean(axis=0)
                det = np.linalg.det(np.vstack([e, n]))
            else:
                out = None
                break
            out.append(1 if det > 0 else -1)
        if out is None:
            # no ambient orientation: propagate from the listed order
            canon = _orient(self.complex, np.array(
                [permutation_sign(t) for t in self._tets_in_complex_order()]))
            lookup = dict(zip(self.complex.top, canon))
            out = [lookup[tuple(sorted(t))] * permutation_sign(t) for t in self.tets]
        return out

    def _tets_in_complex_order(self):
        by_key = {tuple(sorted(t)): t for t in self.tets}
        return [by_key[s] for s in self.complex.top]

    def canonical_orientation(self):
        """Orientation sign per tet of ``complex.top`` (ascending tuples)."""
        lookup = {tuple(sorted(t)): o * permutation_sign(t)
                  for t, o in zip(self.tets, self.orientation)}
        return np.array([lookup[s] for s in self.complex.top], dtype=int)

    def _validate(self):
        for t in self.complex.top:
            e = self.edge_vectors(t)
            G = e @ e.T
            vol2 = np.linalg.det(G)
            scale = np.trace(G) ** 3 if np.trace(G) > 0 else 1.0
            if not vol2 > 1e-14 * scale:
                raise DegenerateTetrahedron(f"tetrahedron {t} has zero volume")
        for tri in self.complex.simplices[2]:
            p = self.edge_vectors(tri + (tri[0],))[:2]
            a, b = np.linalg.norm(p[0]), np.linalg.norm(p[1])
            c = np.linalg.norm(p[1] - p[0])
            if not (a < b + c and b < a + c and c < a + b):
                raise DegenerateTetrahedron(f"triangle {tri} violates triangle inequality")
        counts = defaultdict(int)
        for s in self.complex.top:
            for i in range(4):
                counts[s[:i] + s[i + 1:]] += 1
        if any(c != 2 for c in counts.values()):
            raise ComplexError("geometric mesh must be a closed 3-pseudomanifold")
        chain = signed_boundary_chain(self.complex, self.canonical_orientation())
        if chain:
            raise NonOrientable("mesh orientation is not coherent")

    def volumes(self):
        out = []
        for t in self.complex.top:
            e = self.edge_vectors(t)
            out.append(np.sqrt(np.linalg.det(e @ e.T)) / 6.0)
        return np.array(out)

    def reversed(self):
        return GeometricMesh(self.complex, self.coords, self.tets, -self.orientation,
                             self.period, self.sphere_radius, self.level, self.name)

    def __repr__(self):
        return f"GeometricMesh({self.name!r}, level={self.level}, f={self.complex.f_vector})"


# Bey's red refinement; entries index (v0..v3, then midpoints 01,02,03,12,13,23)
_MID = {(0, 1): 4, (0, 2): 5, (0, 3): 6, (1, 2): 7, (1, 3): 8, (2, 3): 9}
_CHILDREN = (
    (0, 4, 5, 6), (4, 1, 7, 8), (5, 7, 2, 9), (6, 8, 9, 3),
    (4, 5, 6, 8), (4, 5, 7, 8), (5, 6, 8, 9), (5, 7, 8, 9),
)


def _bary_table():
    B = np.zeros((10, 4))
    for i in range(4):
        B[i, i] = 1.0
    for (i, j), m in _MID.items():
        B[m, i] = B[m, j] = 0.5
    signs = [int(np.sign(np.linalg.det(B[list(c)]))) for c in _CHILDREN]
    return signs


_CHILD_SIGNS = _bary_table()


def subdivide(mesh):
    """Uniform 1:8 refinement; midpoints re-projected for spherical meshes."""
    coords = [row for row in mesh.coords]
    vids = list(mesh.complex.vertices)
    next_id = max(vids) + 1
    mid = {}

    def midpoint(a, b):
        nonlocal next_id
        key = (a, b) if a < b else (b, a)
        if key in mid:
            return mid[key]
        pa = mesh.coords[mesh._vpos[a]]
        d = mesh.coords[mesh._vpos[b]] - pa
        if mesh.period is not None:
            d = d - mesh.period * np.round(d / mesh.period)
        p = pa + 0.5 * d
        if mesh.period is not None:
            p = np.mod(p, mesh.period)
        if mesh.sphere_radius is not None:
            p = p * (mesh.sphere_radius / np.linalg.norm(p))
        mid[key] = next_id
        vids.append(next_id)
        coords.append(p)
        next_id += 1
        return mid[key]

    tets, orient = [], []
    for t, o in zip(mesh.tets, mesh.orientation):
        local = list(t) + [None] * 6
        for (i, j), m in _MID.items():
            local[m] = midpoint(t[i], t[j])
        for child, cs in zip(_CHILDREN, _CHILD_SIGNS):
            tets.append(tuple(local[c] for c in child))
            orient.append(int(o) * cs)
    X = build_complex([tuple(sorted(t)) for t in tets])
    order = np.argsort(vids)
    coords = np.asarray(coords)[order]
    return GeometricMesh(X, coords, tets, orient, mesh.period, mesh.sphere_radius,
                         mesh.level + 1, mesh.name)
