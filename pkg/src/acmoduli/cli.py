"""Command-line interface: ``acmoduli <command> ...``.

Exit codes: 0 success, 1 bad input, 2 failed mathematical check,
3 eigensolver failure.
"""
import argparse
import sys

import numpy as np

from . import generators, io, spectral, walls
from .cohomology import les_of_pair, betti, dim_v_formula
from .errors import ACModuliError, ComplexError, SolverError
from .report import StageError, assemble_report
from .simplicial import GeometricMesh, ManifoldPair, subdivide

MAX_REFINE = 6
EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_SOLVER = 0, 1, 2, 3

# continuum values (lambda_1, smallest |gamma|) for the geometric builtins
ORACLES = {"t3": (4 * np.pi ** 2, 2 * np.pi), "s3_round": (3.0, 2.0)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _add_input(p):
    p.add_argument("path", nargs="?", help="SCPLX v1 file")
    p.add_argument("--builtin", choices=generators.BUILTINS)
    p.add_argument("--n", type=int, default=3, help="torus grid cells per direction")
    p.add_argument("--refine", type=int, default=0)


def _add_output(p):
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("-o", "--output", help="write the result here instead of stdout")


def _add_spectral(p):
    p.add_argument("--eigs", type=int, default=12)
    p.add_argument("--orientation", choices=("induced", "reversed", "both"),
                   default="induced")
    p.add_argument("--method", choices=("auto", "dense", "sparse"), default="auto")
    p.add_argument("--formulation", choices=spectral.CURL_FORMULATIONS,
                   default="stiffness")
    p.add_argument("--residual-rtol", type=float, default=spectral.RESIDUAL_RTOL)
    p.add_argument("--group-rtol", type=float, default=spectral.GROUP_RTOL)
    p.add_argument("--zero-rtol", type=float, default=spectral.ZERO_RTOL)
    p.add_argument("--wall-rtol", type=float, default=walls.WALL_RTOL)


def build_parser():
    parser = _Parser(prog="acmoduli",
                     description="Moduli dimensions and Fredholm walls of "
                                 "triangulated 4-manifolds with boundary.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a built-in triangulation as SCPLX v1")
    p.add_argument("name", choices=generators.BUILTINS)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--refine", type=int, default=0)
    p.add_argument("-o", "--output")

    for name, text in (("betti", "Betti numbers"),
                       ("les", "long exact sequence of the pair"),
                       ("moduli", "moduli dimension and operator bookkeeping")):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_output(p)

    for name, text in (("spectrum", "Laplace and curl spectra of a link mesh"),
                       ("walls", "Fredholm walls and admissible rates")):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_output(p)
        _add_spectral(p)
        p.add_argument("--beta", type=float, default=-1.0)
        p.add_argument("--dump-matrices", metavar="DIR")
        p.add_argument("--plot-data", metavar="FILE",
                       help="convergence table over levels 0..--refine")

    p = sub.add_parser("report", help="full report for a manifold pair")
    _add_input(p)
    _add_output(p)
    _add_spectral(p)
    p.add_argument("--beta", type=float, default=-1.0)
    p.add_argument("--link-mesh", metavar="NAME|FILE",
                   help="link geometry: a geometric builtin, an SCPLX file or "
                        "'auto'; omitted means topology only")
    return parser


def _validate(args):
    if getattr(args, "refine", 0) < 0 or getattr(args, "refine", 0) > MAX_REFINE:
        raise UsageError(f"--refine must be between 0 and {MAX_REFINE}")
    if hasattr(args, "eigs") and args.eigs < 1:
        raise UsageError("--eigs must be >= 1")
    if hasattr(args, "beta") and not args.beta < 0:
        raise UsageError("--beta must be negative")
    if getattr(args, "n", 3) < 3:
        raise UsageError("--n must be >= 3")


def _load(args):
    if args.builtin and args.path:
        raise UsageError("give either a file or --builtin, not both")
    if args.builtin:
        obj = generators.generate_mesh(args.builtin, args.n, args.refine)
        return obj, args.builtin
    if not args.path:
        raise UsageError("no input: give an SCPLX file or --builtin")
    obj = io.read_scplx(args.path).to_object(name=args.path)
    if isinstance(obj, GeometricMesh):
        for _ in range(args.refine):
            obj = subdivide(obj)
    return obj, None


def _emit(args, data, text):
    out = io.to_json(data) if args.format == "json" else text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _need_pair(obj):
    if not isinstance(obj, ManifoldPair):
        raise UsageError("this command needs a 4-dimensional pair")
    return obj


def _need_mesh(obj):
    if not isinstance(obj, GeometricMesh):
        raise UsageError("this command needs a 3-dimensional mesh with coordinates")
    return obj


def cmd_gen(args):
    obj = generators.generate_mesh(args.name, args.n, args.refine)
    text = io.serialize_scplx(obj)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_betti(args):
    obj, _ = _load(args)
    if isinstance(obj, ManifoldPair):
        prof = les_of_pair(obj)
        data = {"betti_C": prof.b_C, "betti_L": prof.b_L, "betti_cs": prof.b_cs}
    else:
        X = obj.complex if isinstance(obj, GeometricMesh) else obj
        data = {"betti": betti(X)}
    text = "\n".join(f"{k}: {v}" for k, v in data.items())
    _emit(args, data, text)
    return EXIT_OK


def cmd_les(args):
    pair = _need_pair(_load(args)[0])
    prof = les_of_pair(pair)
    data = {
        "nodes": [{"node": n, "dim": d} for n, d in prof.les_nodes],
        "ranks": prof.les_ranks,
        "exactness_defects": prof.exactness_defects,
        "dim_V": prof.dim_V,
        "dim_V_formula": dim_v_formula(prof, check=False),
    }
    lines = [f"{n:>8}  dim {d}" for n, d in prof.les_nodes]
    lines += [f"{k}: rank {v}" for k, v in prof.les_ranks.items()]
    lines.append(f"dim V = {prof.dim_V} (alternating sum {data['dim_V_formula']})")
    _emit(args, data, "\n".join(lines))
    ok = data["dim_V"] == data["dim_V_formula"] and not any(prof.exactness_defects.values())
    return EXIT_OK if ok else EXIT_CHECK


def cmd_moduli(args):
    pair = _need_pair(_load(args)[0])
    rep = assemble_report(pair)
    _emit(args, io.report_dict(rep), io.report_text(rep))
    return EXIT_OK if rep.ok else EXIT_CHECK


def _orientations(args):
    return ("induced", "reversed") if args.orientation == "both" else (args.orientation,)


def _spectra(mesh, args, orientation, fe=None):
    spectral.ZERO_RTOL = args.zero_rtol
    fe = fe if fe is not None and fe.orientation == orientation else \
        spectral.assemble(mesh, orientation)
    l0 = spectral.laplacian0_spectrum(mesh, args.eigs, fe, args.method, args.residual_rtol)
    curl = spectral.curl_spectrum(mesh, args.eigs, orientation, fe, args.method,
                                  args.residual_rtol, formulation=args.formulation)
    return fe, l0, curl


def _plot(args, name):
    if args.refine < 1:
        raise UsageError("--plot-data needs --refine >= 1 (need >=2 levels)")
    if name is None:
        raise UsageError("--plot-data needs a builtin mesh")
    mesh = generators.generate_mesh(name, args.n, 0)
    levels = []
    for lev in range(args.refine + 1):
        fe, l0, curl = _spectra(mesh, args, "induced")
        levels.append((lev, fe.M1.shape[0], l0.nonzero()[0], np.abs(curl.eigenvalues).min()))
        if lev < args.refine:
            mesh = subdivide(mesh)
    io.emit_plot_data(levels, args.plot_data, ORACLES.get(name))


def cmd_spectrum(args, with_walls=False):
    mesh, name = _load(args)
    mesh = _need_mesh(mesh)
    out, lines = {"mesh_level": mesh.level}, [f"mesh level {mesh.level}"]
    fe = None
    curls = {}
    for orient in _orientations(args):
        fe, l0, curl = _spectra(mesh, args, orient, fe)
        curls[orient] = curl
        entry = {"lambda0": io.spectrum_dict(l0, args.group_rtol),
                 "curl": io.spectrum_dict(curl, args.group_rtol),
                 "residuals": {"lambda0": float(l0.residuals.max()),
                               "curl": float(curl.residuals.max())}}
        lines.append(f"[{orient}] laplace0 (zero modes {l0.zero_mode_count}):")
        lines += [f"  {v:.10g}  x{m}" for v, m in l0.groups(args.group_rtol)]
        lines.append(f"[{orient}] curl (zero modes {curl.zero_mode_count}):")
        lines += [f"  {v:+.10g}  x{m}" for v, m in curl.groups(args.group_rtol)]
        if with_walls:
            ws = walls.wall_set(l0, curl, args.wall_rtol, orient)
            iv = walls.admissible_gamma(ws, args.beta)
            entry["walls"] = io.walls_dict(ws)
            entry["admissible_gamma"] = io.interval_dict(iv)
            lines.append(f"[{orient}] walls (complete for |rate| <= {ws.horizon:.6g}):")
            for w in ws.walls:
                if abs(w.rate) <= ws.horizon:
                    mult = "-" if w.multiplicity is None else w.multiplicity
                    lines.append(f"  {w.rate:+.10g}  mult {mult}")
            lines.append(f"[{orient}] admissible gamma: "
                         + ("empty" if iv.empty else f"({iv.lower:.6g}, 0), bound by {iv.binding}"))
        out[orient] = entry
        if args.dump_matrices:
            io.dump_matrices(fe, args.dump_matrices, prefix=f"{orient}_")
    code = EXIT_OK
    if len(curls) == 2:
        a, b = curls["induced"].eigenvalues, curls["reversed"].eigenvalues
        dev = float(np.max(np.abs(np.sort(a) + np.sort(b)[::-1]))) if len(a) == len(b) else np.inf
        out["orientation_reversal_deviation"] = dev
        lines.append(f"orientation reversal: max |gamma + gamma'| = {dev:.3g}")
        if not dev <= 1e-10 * max(1.0, float(np.abs(a).max())):
            code = EXIT_CHECK
    if args.plot_data:
        _plot(args, name)
    _emit(args, out, "\n".join(lines))
    return code


def cmd_walls(args):
    return cmd_spectrum(args, with_walls=True)


def _link_mesh(args, pair_name):
    choice = args.link_mesh
    if choice is None:
        return None
    if choice == "auto":
        if pair_name not in generators.DEFAULT_LINK_MESH:
            raise UsageError("--link-mesh auto needs a builtin pair")
        choice = generators.DEFAULT_LINK_MESH[pair_name]
    if choice in generators.MESH_BUILTINS:
        return generators.generate_mesh(choice, args.n, args.refine)
    mesh = io.read_scplx(choice).to_object(name=choice)
    for _ in range(args.refine):
        mesh = subdivide(mesh)
    return _need_mesh(mesh)


def cmd_report(args):
    if args.builtin:
        pair = generators.generate_mesh(args.builtin, args.n, 0)
        name = args.builtin
    else:
        pair, name = _load(args)
    pair = _need_pair(pair)
    mesh = _link_mesh(args, name)
    spectral.ZERO_RTOL = args.zero_rtol
    orientation = "induced" if args.orientation == "both" else args.orientation
    rep = assemble_report(pair, mesh, args.beta, args.eigs, orientation, args.method,
                          args.wall_rtol, args.residual_rtol)
    _emit(args, io.report_dict(rep), io.report_text(rep))
    return EXIT_OK if rep.ok else EXIT_CHECK


COMMANDS = {"gen": cmd_gen, "betti": cmd_betti, "les": cmd_les, "moduli": cmd_moduli,
            "spectrum": cmd_spectrum, "walls": cmd_walls, "report": cmd_report}


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except StageError as e:
        return _fail(e.error, e.stage)
    except (UsageError, ComplexError, ValueError, OSError, SolverError,
            ACModuliError) as e:
        return _fail(e)


def _fail(e, stage=None):
    where = f" in {stage}" if stage else ""
    print(f"acmoduli: {type(e).__name__}{where}: {e}", file=sys.stderr)
    if isinstance(e, SolverError):
        if e.residual is not None:
            print(f"acmoduli: achieved residual {e.residual:.3g}", file=sys.stderr)
        return EXIT_SOLVER
    if isinstance(e, ACModuliError) and not isinstance(e, ComplexError):
        return EXIT_CHECK
    return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
