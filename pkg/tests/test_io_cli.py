import json
from pathlib import Path

import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings, strategies as st

from acmoduli import generators
from acmoduli.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, run
from acmoduli.cohomology import les_of_pair
from acmoduli.errors import ParseError
from acmoduli.io import (
    dump_matrices,
    emit_plot_data,
    parse_scplx,
    plot_rows,
    rational,
    serialize_scplx,
)
from acmoduli.simplicial import GeometricMesh, ManifoldPair
from acmoduli.spectral import assemble

from helpers import random_pair, relabel

GOLDEN = Path(__file__).parent / "golden"


def roundtrip(obj):
    text = serialize_scplx(obj)
    back = parse_scplx(text).to_object(name=getattr(obj, "name", None))
    return text, back


@pytest.mark.parametrize("name", generators.PAIR_BUILTINS)
def test_pair_roundtrip(name):
    pair = generators.generate_mesh(name)
    text, back = roundtrip(pair)
    assert isinstance(back, ManifoldPair)
    assert serialize_scplx(back) == text
    assert np.array_equal(back.top_orientation, pair.top_orientation)


@pytest.mark.parametrize("name", ["t3", "s3_boundary_simplex", "s3_round"])
def test_mesh_roundtrip_keeps_metric(name):
    mesh = generators.generate_mesh(name)
    text, back = roundtrip(mesh)
    assert isinstance(back, GeometricMesh)
    assert serialize_scplx(back) == text
    a, b = assemble(mesh), assemble(back)
    assert abs(a.M1 - b.M1).max() <= 1e-14
    assert abs(a.C - b.C).max() <= 1e-14


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_pair_roundtrip(seed):
    pair = random_pair(seed)
    text, back = roundtrip(pair)
    assert serialize_scplx(back) == text
    p, q = les_of_pair(pair), les_of_pair(back)
    assert (p.b_C, p.b_L, p.dim_V) == (q.b_C, q.b_L, q.dim_V)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_canonical_form_ignores_labels_order(seed):
    pair = generators.cp2_minus_ball()
    q = relabel(pair, np.random.default_rng(seed))
    lines = serialize_scplx(q).splitlines()
    simplices = [l for l in lines if l.startswith("s ")]
    assert simplices == sorted(simplices, key=lambda l: sorted(map(int, l.split()[1:])))


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("scplx 2 dim=3\n", 1),
    ("scplx 1 dim=3 colour=red\n", 1),
    ("scplx 1 dim=9\n", 1),
    ("scplx 1 dim=1\nv 0\n# comment\nq 1 2\n", 4),
    ("scplx 1 dim=1\nv 0 1 2\n", 2),
    ("scplx 1 dim=1\nv 0\nv 0\n", 3),
    ("scplx 1 dim=1\ns 0 1 2\n", 2),
    ("scplx 1 dim=1\ns 0 0\n", 2),
    ("scplx 1 dim=1\ns 0 x\n", 2),
    ("scplx 1 dim=1\nv -1\n", 2),
    ("scplx 1 dim=1 period=a,b\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as err:
        parse_scplx(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_parse_errors_without_line():
    with pytest.raises(ParseError):
        parse_scplx("scplx 1 dim=1\nv 0\n")
    with pytest.raises(ParseError):
        parse_scplx("scplx 1 dim=1\nv 0 0 0 0\ns 0 1\n")


def test_rational():
    assert rational(3) == "3"
    assert rational("-6/4") == "-3/2"


def test_dump_matrices(tmp_path):
    fe = assemble(generators.t3(3))
    paths = dump_matrices(fe, tmp_path, prefix="x_")
    assert {p.name for p in paths} == {f"x_{n}.mtx" for n in fe.as_dict()}
    M1 = scipy.io.mmread(str(tmp_path / "x_M1.mtx"))
    assert abs(M1 - fe.M1).max() <= 1e-15


def test_plot_rows():
    with pytest.raises(ValueError, match="need >=2 levels"):
        plot_rows([(0, 10, 1.0, 1.0)])
    text = emit_plot_data([(0, 10, 4.0, 2.5), (1, 80, 3.2, 2.1)], oracle=(3.0, 2.0))
    lines = text.splitlines()
    assert lines[0].split()[1:] == ["level", "dof", "lambda1", "min_abs_curl",
                                     "lambda1_gap", "curl_gap"]
    assert np.isclose(float(lines[2].split()[4]), 0.2 / 3)


# ---------------------------------------------------------------- CLI


@pytest.mark.parametrize("name", generators.PAIR_BUILTINS)
def test_golden_moduli_json(name, tmp_path):
    out = tmp_path / "r.json"
    assert run(["moduli", "--builtin", name, "--format", "json", "-o", str(out)]) == EXIT_OK
    assert json.loads(out.read_text()) == json.loads((GOLDEN / f"{name}.json").read_text())


def test_cp2_minus_ball_json_field(capsys):
    assert run(["moduli", "--builtin", "cp2_minus_ball", "--format", "json"]) == EXIT_OK
    assert '"dim_moduli": 1' in capsys.readouterr().out


def test_gen_then_betti(tmp_path, capsys):
    f = tmp_path / "d2xt2.scplx"
    assert run(["gen", "d2xt2", "-o", str(f)]) == EXIT_OK
    assert run(["betti", str(f), "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["betti_L"] == [1, 3, 3, 1]
    assert run(["les", str(f)]) == EXIT_OK


def test_gen_mesh_then_spectrum(tmp_path, capsys):
    f = tmp_path / "t3.scplx"
    assert run(["gen", "t3", "-o", str(f)]) == EXIT_OK
    assert run(["spectrum", str(f), "--eigs", "6", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["induced"]["lambda0"]["zero_mode_count"] == 1


def test_walls_both_orientations(capsys):
    code = run(["walls", "--builtin", "t3", "--eigs", "8", "--orientation", "both",
                "--format", "json"])
    assert code == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["orientation_reversal_deviation"] <= 1e-10
    assert data["induced"]["admissible_gamma"]["binding"] == "beta"


def test_report_text_with_mesh(capsys):
    assert run(["report", "--builtin", "d2xt2", "--link-mesh", "auto", "--eigs", "6"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "admissible gamma: (-1, 0), bound by beta" in out
    assert "FAIL" not in out


def test_report_mismatched_mesh_is_check_failure(capsys):
    assert run(["report", "--builtin", "ball4", "--link-mesh", "t3", "--eigs", "4"]) == EXIT_CHECK


def test_plot_data(tmp_path, capsys):
    f = tmp_path / "plot.dat"
    assert run(["spectrum", "--builtin", "t3", "--refine", "1", "--eigs", "6",
                "--plot-data", str(f)]) == EXIT_OK
    rows = [l for l in f.read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 2
    assert run(["spectrum", "--builtin", "t3", "--eigs", "6",
                "--plot-data", str(f)]) == EXIT_INPUT
    assert "need >=2 levels" in capsys.readouterr().err


def test_dump_matrices_cli(tmp_path):
    assert run(["spectrum", "--builtin", "t3", "--eigs", "4",
                "--dump-matrices", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "induced_Ccurl.mtx").exists()


@pytest.mark.parametrize("argv", [
    ["moduli"],
    ["moduli", "--builtin", "nope"],
    ["moduli", "--builtin", "t3"],
    ["spectrum", "--builtin", "ball4"],
    ["spectrum", "--builtin", "t3", "--refine", "9"],
    ["walls", "--builtin", "t3", "--beta", "1"],
    ["spectrum", "--builtin", "t3", "--eigs", "0"],
    ["betti", "/nonexistent/file.scplx"],
    ["report", "--builtin", "d2xt2", "--link-mesh", "/nonexistent"],
])
def test_input_errors_exit_1(argv, capsys):
    assert run(argv) == EXIT_INPUT
    assert capsys.readouterr().err


def test_parse_error_exit_1(tmp_path, capsys):
    f = tmp_path / "bad.scplx"
    f.write_text("scplx 1 dim=4\ns 0 1 2\n")
    assert run(["betti", str(f)]) == EXIT_INPUT
    assert "line 2" in capsys.readouterr().err


def test_solver_failure_exit_3(capsys):
    code = run(["spectrum", "--builtin", "t3", "--eigs", "4", "--residual-rtol", "1e-30"])
    assert code == EXIT_SOLVER
    assert "achieved residual" in capsys.readouterr().err
