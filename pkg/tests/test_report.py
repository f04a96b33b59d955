import numpy as np
import pytest

from acmoduli import generators
from acmoduli.report import (
    StageError,
    assemble_report,
    full_operator_report,
    linearized_operator_report,
    moduli_dimension,
)
from acmoduli.simplicial import build_complex, extract_pair

# name: (dim moduli, (ker, coker, index), (ker at gamma, ker at -gamma))
EXPECTED = {
    "ball4": (0, (0, 0, 0), (0, 2)),
    "d2xt2": (0, (0, 2, -2), (0, 8)),
    "cp2_minus_ball": (1, (1, 0, 1), (1, 3)),
    "t4_minus_ball": (3, (3, 4, -1), (14, 16)),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_topology_only_report(name):
    pair = generators.generate_mesh(name)
    rep = assemble_report(pair)
    dm, lin, full = EXPECTED[name]
    assert rep.dim_moduli == dm == moduli_dimension(pair)
    assert (rep.ker_dim, rep.coker_dim, rep.index) == lin == linearized_operator_report(pair)
    assert (rep.full_op_ker_gamma, rep.full_op_ker_minus_gamma) == full
    assert full_operator_report(pair)[:2] == full
    assert rep.ok, [c for c in rep.checks if not c.passed]
    assert rep.walls is None and rep.spectra is None
    assert rep.admissible_gamma == "topology-only"
    assert rep.full_index_jump == 2 * (full[1] - full[0])


def test_t4_minus_ball_split():
    rep = assemble_report(generators.t4_minus_ball())
    assert (rep.dim_V, rep.v_plus, rep.v_minus) == (6, 3, 3)
    assert rep.harmonic_image_dims == [0, 4, 6, 4, 0]


def test_index_matches_ker_minus_coker():
    for name in EXPECTED:
        rep = assemble_report(generators.generate_mesh(name))
        assert rep.index == rep.ker_dim - rep.coker_dim


def test_report_with_link_mesh():
    pair = generators.d2xt2()
    mesh = generators.t3(3)
    rep = assemble_report(pair, mesh, beta=-1.0, eigs=8)
    assert rep.ok, [c for c in rep.checks if not c.passed]
    names = {c.name for c in rep.checks}
    assert {"mesh_matches_link", "laplace0_zero_modes", "curl_zero_modes"} <= names
    # the first negative wall is near -2pi, so beta = -1 binds
    assert rep.admissible_gamma.binding == "beta"
    assert rep.admissible_gamma.lower == -1.0
    assert rep.walls.nearest_negative().rate < -2 * np.pi


def test_wrong_link_mesh_fails_check():
    rep = assemble_report(generators.ball4(), generators.t3(3), eigs=4)
    check = next(c for c in rep.checks if c.name == "mesh_matches_link")
    assert not check.passed and not rep.ok


def test_stage_error_names_stage():
    X = build_complex([(0, 1, 2, 3, 4)])
    pair = extract_pair(X)
    pair.link.simplices = ()
    with pytest.raises(StageError) as err:
        assemble_report(pair)
    assert err.value.stage == "cohomology"


def test_ball4_with_round_sphere():
    rep = assemble_report(generators.ball4(), generators.s3_round(0), beta=-2.0, eigs=6)
    assert rep.ok and rep.dim_moduli == 0
    iv = rep.admissible_gamma
    assert iv.binding == "wall"
    assert abs(iv.lower + np.sqrt(3)) <= 0.1 * np.sqrt(3)
    # the binding wall comes from the Laplacian and beats every curl wall
    w = rep.walls.nearest_negative()
    assert w.delta_count > 0 and w.curl_count == 0
