import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acmoduli import generators
from acmoduli.cohomology import betti
from acmoduli.errors import (
    ComplexError,
    DegenerateTetrahedron,
    DuplicateSimplex,
    NonOrientable,
    NotPseudomanifold,
    RepeatedVertexInSimplex,
)
from acmoduli.simplicial import (
    GeometricMesh,
    barycentric_subdivision,
    boundary_matrix,
    build_complex,
    extract_pair,
    signed_boundary_chain,
    subdivide,
)


def test_full_simplex_closure():
    X = build_complex([(0, 1, 2, 3, 4)])
    assert X.f_vector == (5, 10, 10, 5, 1)


def test_boundary_of_simplex_is_sphere():
    faces = [tuple(j for j in range(5) if j != i) for i in range(5)]
    X = build_complex(faces)
    assert X.f_vector == (5, 10, 10, 5)
    assert betti(X) == [1, 0, 0, 1]


def test_validation_errors():
    with pytest.raises(RepeatedVertexInSimplex):
        build_complex([(0, 1, 1, 2)])
    with pytest.raises(DuplicateSimplex):
        build_complex([(0, 1, 2), (2, 1, 0)])
    with pytest.raises(ComplexError):
        build_complex([(0, -1, 2)])
    with pytest.raises(ComplexError):
        build_complex([])


def test_listed_order_sets_orientation():
    a = build_complex([(0, 1, 2)])
    b = build_complex([(1, 0, 2)])
    assert a.top_signs()[0] == 1 and b.top_signs()[0] == -1
    assert a != b


def test_edge_boundary_column():
    X = build_complex([(0, 1)])
    assert boundary_matrix(X, 1).to_dense() == [[-1], [1]]


def test_boundary_squares_to_zero_and_rank():
    X = generators.s3_boundary_simplex().complex
    for k in range(2, X.dim + 1):
        assert (boundary_matrix(X, k - 1) @ boundary_matrix(X, k)).is_zero()
    assert boundary_matrix(X, 3).rank() == 4
    with pytest.raises(ValueError):
        boundary_matrix(X, 0)


@pytest.mark.parametrize("name", generators.PAIR_BUILTINS)
def test_pair_boundary_is_link_cycle(name):
    pair = generators.generate_mesh(name)
    chain = signed_boundary_chain(pair.total, pair.top_orientation)
    # interior faces cancel; what is left is the (sign-convention) link cycle
    assert set(chain) == set(pair.link.top)
    link_chain = dict(zip(pair.link.top, pair.link.top_signs()))
    ratio = {chain[f] * link_chain[f] for f in chain}
    assert ratio == {-1}
    assert not signed_boundary_chain(pair.link, pair.link.top_signs())


def test_ball4_pair():
    pair = generators.ball4()
    assert pair.link.f_vector == (5, 10, 10, 5)


def test_d2xt2_link_is_t3():
    assert betti(generators.d2xt2().link) == [1, 3, 3, 1]


def test_cp2_minus_ball_counts():
    pair = generators.cp2_minus_ball()
    assert pair.total.vertex_count == 8
    assert betti(pair.link) == [1, 0, 0, 1]


def test_cp2_is_closed_with_euler_three():
    X = generators.cp2()
    assert X.f_vector == (9, 36, 84, 90, 36)
    assert X.euler_characteristic() == 3


def test_t3_counts():
    mesh = generators.t3(3)
    assert mesh.complex.vertex_count == 27
    assert len(mesh.complex.top) == 162
    assert len(subdivide(mesh).complex.top) == 1296


def test_small_torus_rejected():
    with pytest.raises(ComplexError):
        generators.t3(2)
    with pytest.raises(ComplexError):
        generators.d2xt2(2)


def test_flat_subdivision_preserves_volume():
    mesh = generators.t3(3)
    fine = subdivide(mesh)
    assert abs(fine.volumes().sum() - mesh.volumes().sum()) <= 1e-12 * mesh.volumes().sum()
    assert abs(mesh.volumes().sum() - 1.0) < 1e-12


def test_sphere_refinement_stays_on_sphere():
    mesh = generators.s3_round(1)
    r = np.linalg.norm(mesh.coords, axis=1)
    assert np.all(np.abs(r - 1.0) <= 1e-12)
    assert mesh.complex.f_vector == (840, 5640, 9600, 4800)


def test_six_hundred_cell():
    mesh = generators.six_hundred_cell()
    assert mesh.complex.f_vector == (120, 720, 1200, 600)
    assert betti(mesh.complex) == [1, 0, 0, 1]


def test_subdivision_keeps_betti():
    mesh = generators.s3_boundary_simplex()
    assert betti(subdivide(mesh).complex) == [1, 0, 0, 1]
    assert betti(subdivide(generators.t3(3)).complex) == [1, 3, 3, 1]


def test_barycentric_subdivision_pair():
    pair = barycentric_subdivision(generators.ball4())
    assert len(pair.total.top) == 120
    assert betti(pair.link) == [1, 0, 0, 1]


def test_not_pseudomanifold():
    X = build_complex([(0, 1, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 3, 6)])
    with pytest.raises(NotPseudomanifold):
        extract_pair(X)


def test_non_orientable():
    # join of the 5-vertex Moebius band with an edge
    moebius = [(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)]
    X = build_complex([t + (5, 6) for t in moebius])
    with pytest.raises(NonOrientable):
        extract_pair(X)


def test_degenerate_tetrahedron():
    X = build_complex([tuple(j for j in range(5) if j != i) for i in range(5)])
    coords = np.zeros((5, 3))
    coords[:, 0] = np.arange(5)
    with pytest.raises(DegenerateTetrahedron):
        GeometricMesh(X, coords)


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(5)))
def test_simplex_orientation_sign(perm):
    X = build_complex([tuple(perm)])
    sign = 1
    p = list(perm)
    for i in range(5):
        for j in range(i + 1, 5):
            if p[i] > p[j]:
                sign = -sign
    assert X.top_signs()[0] == sign
