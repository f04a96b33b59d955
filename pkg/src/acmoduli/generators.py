"""Built-in triangulations.

Torus-like spaces use the Freudenthal (Kuhn) triangulation of a cube grid:
each cell is cut into d! simplices, one per monotone lattice path through
the cell. Periodic directions need at least 3 cells so that the quotient is
still a simplicial complex.
"""
from itertools import permutations, product

import numpy as np

from .errors import ComplexError
from .simplicial import (
    GeometricMesh,
    build_complex,
    extract_pair,
    permutation_sign,
    subdivide,
)

# Kühnel's 9-vertex CP^2: invariant under the translations of Z3 x Z3
# (vertex 3x+y <-> point (x, y)), facets in four translation orbits. The
# first facet is listed in the orientation for which the intersection form
# is +1 (CP^2 rather than its conjugate).
CP2_9_FACETS = (
    (1, 0, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 4, 5), (0, 1, 3, 4, 6),
    (0, 1, 3, 5, 7), (0, 1, 3, 6, 7), (0, 1, 4, 5, 6), (0, 1, 5, 6, 8),
    (0, 1, 5, 7, 8), (0, 1, 6, 7, 8), (0, 2, 3, 4, 8), (0, 2, 3, 5, 8),
    (0, 2, 4, 5, 6), (0, 2, 4, 6, 7), (0, 2, 4, 7, 8), (0, 2, 5, 6, 8),
    (0, 2, 6, 7, 8), (0, 3, 4, 6, 7), (0, 3, 4, 7, 8), (0, 3, 5, 7, 8),
    (1, 2, 3, 4, 8), (1, 2, 3, 5, 7), (1, 2, 3, 6, 7), (1, 2, 3, 6, 8),
    (1, 2, 4, 5, 7), (1, 2, 4, 7, 8), (1, 2, 6, 7, 8), (1, 3, 4, 6, 8),
    (1, 4, 5, 6, 8), (1, 4, 5, 7, 8), (2, 3, 5, 6, 7), (2, 3, 5, 6, 8),
    (2, 4, 5, 6, 7), (3, 4, 5, 6, 7), (3, 4, 5, 6, 8), (3, 4, 5, 7, 8),
)

PAIR_BUILTINS = ("ball4", "d2xt2", "cp2_minus_ball", "t4_minus_ball")
MESH_BUILTINS = ("t3", "s3_boundary_simplex", "s3_round")
BUILTINS = MESH_BUILTINS + PAIR_BUILTINS


def kuhn_grid(cells, periodic):
    """Freudenthal triangulation of a product of intervals and circles.

    Parameters
    ----------
    cells : sequence of int
        Number of cells per direction.
    periodic : sequence of bool
        Whether each direction is a circle (needs >= 3 cells).

    Returns
    -------
    paths : list of tuple
        Top simplices as vertex ids listed along their lattice path.
    signs : list of int
        Orientation of each path relative to the ambient coordinate order.
    coords : array (N, d)
        Grid points scaled to the unit cube; vertex id is the row.
    """
    cells = [int(c) for c in cells]
    d = len(cells)
    for c, p in zip(cells, periodic):
        if c < (3 if p else 1):
            raise ComplexError(
                f"periodic directions need >= 3 cells (got {c})" if p
                else "interval directions need >= 1 cell")
    pts = [c if p else c + 1 for c, p in zip(cells, periodic)]
    strides = np.cumprod([1] + pts[:-1])

    def vid(x):
        return int(sum((xi % n) * s for xi, n, s in zip(x, pts, strides)))

    paths, signs = [], []
    perms = list(permutations(range(d)))
    perm_signs = [permutation_sign(p) for p in perms]
    for corner in product(*[range(c) for c in cells]):
        for perm, sg in zip(perms, perm_signs):
            x = list(corner)
            path = [vid(x)]
            for axis in perm:
                x[axis] += 1
                path.append(vid(x))
            paths.append(tuple(path))
            signs.append(sg)
    grid = np.array(list(product(*[range(n) for n in reversed(pts)])))[:, ::-1]
    coords = grid / np.array(cells, dtype=float)
    return paths, signs, coords


def remove_vertex_star(simplices, v):
    return [s for s in simplices if v not in s]


def t3(n=3):
    paths, signs, coords = kuhn_grid([n] * 3, [True] * 3)
    X = build_complex(paths)
    mesh = GeometricMesh(X, coords, tets=paths, period=np.ones(3), name="t3")
    return mesh


def s3_boundary_simplex():
    """Boundary of the 4-simplex, vertices on the unit sphere in R^4."""
    P = np.eye(5) - 1.0 / 5
    # orthonormal basis of the hyperplane sum(x) = 0
    q, _ = np.linalg.qr(P)
    basis = q[:, :4]
    coords = P @ basis
    coords /= np.linalg.norm(coords, axis=1)[:, None]
    faces = [tuple(j for j in range(5) if j != i) for i in range(5)]
    X = build_complex(faces)
    return GeometricMesh(X, coords, sphere_radius=1.0, name="s3_boundary_simplex")


def six_hundred_cell():
    """Boundary of the 600-cell: 120 unit vectors, 600 regular tetrahedra.

    Vertices are the unit icosians; edges join points at distance 1/phi and
    every 4-clique of the edge graph is a cell.
    """
    phi = (1 + 5 ** 0.5) / 2
    pts = set()
    for i in range(4):
        for s in (1.0, -1.0):
            v = [0.0] * 4
            v[i] = s
            pts.add(tuple(v))
    pts.update(product((0.5, -0.5), repeat=4))
    base = (phi / 2, 0.5, 1 / (2 * phi), 0.0)
    for perm in permutations(range(4)):
        if permutation_sign(perm) < 0:
            continue
        for signs in product((1, -1), repeat=3):
            v = [0.0] * 4
            for i, (b, s) in enumerate(zip(base, signs + (1,))):
                v[perm[i]] = b * s + 0.0
            pts.add(tuple(round(x, 12) + 0.0 for x in v))
    coords = np.array(sorted(pts))
    dist = np.linalg.norm(coords[:, None] - coords[None], axis=2)
    adj = np.abs(dist - 1 / phi) < 1e-9
    nbrs = [set(np.flatnonzero(row).tolist()) for row in adj]
    tets = set()
    for a in range(len(coords)):
        for b in nbrs[a]:
            for c in nbrs[a] & nbrs[b]:
                for d in nbrs[a] & nbrs[b] & nbrs[c]:
                    tets.add(tuple(sorted((a, b, c, d))))
    X = build_complex(sorted(tets))
    return GeometricMesh(X, coords, sphere_radius=1.0, name="s3_round")


def s3_round(refine=0):
    """Round unit 3-sphere: the 600-cell, refined and re-projected."""
    mesh = six_hundred_cell()
    for _ in range(int(refine)):
        mesh = subdivide(mesh)
    return mesh


def ball4():
    return extract_pair(build_complex([(0, 1, 2, 3, 4)]), name="ball4")


def d2xt2(n=3):
    paths, signs, _ = kuhn_grid([1, 1, n, n], [False, False, True, True])
    return extract_pair(build_complex(paths, signs), name="d2xt2")


def cp2():
    return build_complex(CP2_9_FACETS)


def cp2_minus_ball():
    return extract_pair(build_complex(remove_vertex_star(CP2_9_FACETS, 0)),
                        name="cp2_minus_ball")


def t4(n=3):
    paths, signs, _ = kuhn_grid([n] * 4, [True] * 4)
    return build_complex(paths, signs)


def t4_minus_ball(n=3):
    paths, signs, _ = kuhn_grid([n] * 4, [True] * 4)
    keep = [(p, s) for p, s in zip(paths, signs) if 0 not in p]
    return extract_pair(build_complex([p for p, _ in keep], [s for _, s in keep]),
                        name="t4_minus_ball")


def generate_mesh(name, n=3, refine=0):
    """Return the named built-in (a ManifoldPair or a GeometricMesh)."""
    if name == "t3":
        mesh = t3(n)
        for _ in range(int(refine)):
            mesh = subdivide(mesh)
        return mesh
    if name == "s3_boundary_simplex":
        mesh = s3_boundary_simplex()
        for _ in range(int(refine)):
            mesh = subdivide(mesh)
        return mesh
    if name == "s3_round":
        return s3_round(refine)
    if name == "ball4":
        return ball4()
    if name == "d2xt2":
        return d2xt2(n)
    if name == "cp2_minus_ball":
        return cp2_minus_ball()
    if name == "t4_minus_ball":
        return t4_minus_ball(n)
    raise ValueError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


# default link geometry used when a report is requested for a built-in pair
DEFAULT_LINK_MESH = {
    "ball4": "s3_round",
    "cp2_minus_ball": "s3_round",
    "t4_minus_ball": "s3_round",
    "d2xt2": "t3",
}
