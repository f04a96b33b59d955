"""SCPLX v1 meshes, JSON/text reports, matrix dumps and plot data.

SCPLX v1::

    scplx 1 dim=3 [period=1,1,1] [sphere=1]
    v <id> [x y z [w]]
    s <v0> <v1> ... <vk>

Only top simplices are listed (faces are implied) and their listed order is
their orientation. ``#`` starts a comment. The optional ``period`` and
``sphere`` header keys carry torus periods and the sphere radius so that a
written mesh reloads with the same metric.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.io

from .errors import ParseError
from .simplicial import GeometricMesh, SimplicialComplex, build_complex, extract_pair


@dataclass
class Scplx:
    """Parsed SCPLX content.

    ``simplices`` keeps the listed vertex order; ``coords`` maps vertex id to
    a point, or is empty when no coordinates were given.
    """

    dim: int
    simplices: list
    coords: dict
    period: tuple = None
    sphere_radius: float = None

    def complex(self):
        return build_complex(self.simplices)

    def to_object(self, name=None):
        """A ManifoldPair (dim 4), GeometricMesh (dim 3 with coordinates)
        or plain SimplicialComplex."""
        X = self.complex()
        if self.dim == 4:
            return extract_pair(X, name=name)
        if self.dim == 3 and self.coords:
            missing = [v for v in X.vertices if v not in self.coords]
            if missing:
                raise ParseError(f"vertex {missing[0]} has no coordinates")
            pts = np.array([self.coords[v] for v in X.vertices])
            return GeometricMesh(X, pts, tets=self.simplices, period=self.period,
                                 sphere_radius=self.sphere_radius, name=name)
        return X


def _header(tokens, lineno):
    if len(tokens) < 3 or tokens[0] != "scplx" or tokens[1] != "1" \
            or not tokens[2].startswith("dim="):
        raise ParseError("header must be 'scplx 1 dim=<k>'", lineno)
    out = {}
    for tok in tokens[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ParseError(f"bad header field {tok!r}", lineno)
        try:
            if key == "dim":
                out["dim"] = int(val)
            elif key == "period":
                out["period"] = tuple(float(x) for x in val.split(","))
            elif key == "sphere":
                out["sphere"] = float(val)
            else:
                raise ParseError(f"unknown header field {key!r}", lineno)
        except ValueError:
            raise ParseError(f"bad value in header field {tok!r}", lineno) from None
    if not 1 <= out["dim"] <= 4:
        raise ParseError(f"dim must be between 1 and 4, got {out['dim']}", lineno)
    return out


def parse_scplx(text):
    """Parse SCPLX v1 text; errors carry the 1-based line number."""
    head = None
    coords, simplices = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if head is None:
            head = _header(tok, lineno)
            continue
        if tok[0] == "v":
            if len(tok) not in (2, 5, 6):
                raise ParseError("vertex line needs an id and 0, 3 or 4 coordinates", lineno)
            try:
                vid = int(tok[1])
                pt = tuple(float(x) for x in tok[2:])
            except ValueError:
                raise ParseError(f"bad number in {line!r}", lineno) from None
            if vid < 0:
                raise ParseError("vertex ids must be nonnegative", lineno)
            if vid in coords:
                raise ParseError(f"vertex {vid} defined twice", lineno)
            coords[vid] = pt
        elif tok[0] == "s":
            try:
                s = tuple(int(x) for x in tok[1:])
            except ValueError:
                raise ParseError(f"bad vertex id in {line!r}", lineno) from None
            if len(s) != head["dim"] + 1:
                raise ParseError(f"expected {head['dim'] + 1} vertices, got {len(s)}", lineno)
            if min(s) < 0:
                raise ParseError("vertex ids must be nonnegative", lineno)
            if len(set(s)) != len(s):
                raise ParseError(f"repeated vertex in simplex {s}", lineno)
            simplices.append(s)
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", lineno)
    if head is None:
        raise ParseError("missing header", 1)
    if not simplices:
        raise ParseError("no simplices listed")
    used = {v for s in simplices for v in s}
    if coords:
        lengths = {len(p) for p in coords.values()}
        if len(lengths) > 1:
            raise ParseError("vertices have coordinates of different lengths")
        if lengths == {0}:
            coords = {}
        elif not used <= set(coords):
            raise ParseError(f"vertex {min(used - set(coords))} has no coordinates")
    return Scplx(head["dim"], simplices, {v: p for v, p in coords.items() if p},
                 head.get("period"), head.get("sphere"))


def read_scplx(path):
    return parse_scplx(Path(path).read_text())


def _oriented_top(X, signs=None):
    out = []
    for i, s in enumerate(X.top):
        g = X.sign(s) if signs is None else int(signs[i])
        out.append(s if g > 0 or len(s) < 2 else (s[1], s[0]) + s[2:])
    return out


def serialize_scplx(obj):
    """SCPLX v1 text of a complex, pair or mesh, in canonical form.

    Canonical form lists top simplices in lexicographic order of their
    vertex sets, each as its ascending tuple with the first two vertices
    swapped when negatively oriented.
    """
    coords, head = None, ""
    if isinstance(obj, GeometricMesh):
        X = obj.complex
        top = _oriented_top(X, obj.canonical_orientation())
        coords = obj.coords
        if obj.period is not None:
            head += " period=" + ",".join(repr(float(x)) for x in obj.period)
        if obj.sphere_radius is not None:
            head += f" sphere={float(obj.sphere_radius)!r}"
    elif isinstance(obj, SimplicialComplex):
        X = obj
        top = _oriented_top(X)
    else:
        X = obj.total
        top = _oriented_top(X, obj.top_orientation)
    lines = [f"scplx 1 dim={X.dim}{head}"]
    for i, v in enumerate(X.vertices):
        if coords is None:
            lines.append(f"v {v}")
        else:
            lines.append(f"v {v} " + " ".join(repr(float(x)) for x in coords[i]))
    lines += ["s " + " ".join(str(v) for v in s) for s in top]
    return "\n".join(lines) + "\n"


def write_scplx(obj, path):
    Path(path).write_text(serialize_scplx(obj))


# ------------------------------------------------------------------ reports

def rational(x):
    """Exact rationals as "p/q" (integers as "p")."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _floats(a):
    return [float(x) for x in np.asarray(a).ravel()]


def spectrum_dict(res, grouping_rtol=None):
    from .spectral import GROUP_RTOL

    return {
        "operator": res.operator,
        "eigenvalues": _floats(res.eigenvalues),
        "groups": [{"value": v, "multiplicity": m}
                   for v, m in res.groups(grouping_rtol or GROUP_RTOL)],
        "mesh_level": int(res.mesh_level),
        "zero_mode_count": int(res.zero_mode_count),
        "residuals": _floats(res.residuals),
        "dof": int(res.dof),
        "method": res.method,
    }


def walls_dict(ws):
    return [{"rate": w.rate,
             "sources": [{"kind": k, "value": v} for k, v in w.sources],
             "multiplicity": w.multiplicity} for w in ws.walls]


def interval_dict(iv):
    if isinstance(iv, str):
        return iv
    return {"lower": iv.lower, "upper": iv.upper, "binding": iv.binding, "empty": iv.empty}


def report_dict(rep):
    """JSON-ready dict with stable field names."""
    out = {
        "name": rep.name,
        "dim_moduli": rep.dim_moduli,
        "ker_dim": rep.ker_dim,
        "coker_dim": rep.coker_dim,
        "index": rep.index,
        "full_op_ker_gamma": rep.full_op_ker_gamma,
        "full_op_ker_minus_gamma": rep.full_op_ker_minus_gamma,
        "harmonic_image_dims": list(rep.harmonic_image_dims),
        "betti_C": list(rep.b_C),
        "betti_L": list(rep.b_L),
        "betti_cs": list(rep.b_cs),
        "les": [{"node": n, "dim": d} for n, d in rep.les_nodes],
        "dim_V": rep.dim_V,
        "v_plus": rep.v_plus,
        "v_minus": rep.v_minus,
        "gram": [[rational(x) for x in row] for row in rep.gram],
        "beta": rep.beta,
        "invariant_kernel_at_zero": rep.invariant_kernel_at_zero,
        "full_operator_index_jump": rep.full_index_jump,
        "admissible_gamma": interval_dict(rep.admissible_gamma),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                   for c in rep.checks],
    }
    if rep.spectra is not None:
        out["lambda0"] = spectrum_dict(rep.spectra["lambda0"])
        out["curl"] = spectrum_dict(rep.spectra["curl"])
        out["mesh_level"] = rep.spectra["mesh_level"]
        out["residuals"] = {
            "lambda0": max(_floats(rep.spectra["lambda0"].residuals), default=0.0),
            "curl": max(_floats(rep.spectra["curl"].residuals), default=0.0),
        }
        out["walls"] = walls_dict(rep.walls)
    return out


def to_json(data):
    return json.dumps(data, indent=2, sort_keys=False)


def report_text(rep):
    """Human-readable rendering of a ModuliReport."""
    d = report_dict(rep)
    lines = [
        f"pair: {d['name']}",
        f"dim moduli (dim V+): {d['dim_moduli']}",
        f"betti C {d['betti_C']}  L {d['betti_L']}  cs {d['betti_cs']}",
        f"dim V = {d['dim_V']} = {d['v_plus']} (+) + {d['v_minus']} (-)",
        f"linearised operator: ker {d['ker_dim']}, coker {d['coker_dim']}, "
        f"index {d['index']}",
        f"d + d*: ker at gamma {d['full_op_ker_gamma']}, "
        f"at -gamma {d['full_op_ker_minus_gamma']}, "
        f"images by degree {d['harmonic_image_dims']}",
        f"rate-0 invariant solutions (lower bound) {d['invariant_kernel_at_zero']}, "
        f"full index jump {d['full_operator_index_jump']}",
    ]
    iv = d["admissible_gamma"]
    if isinstance(iv, str):
        lines.append(f"admissible gamma: {iv}")
    elif iv["empty"]:
        lines.append("admissible gamma: empty")
    else:
        lines.append(f"admissible gamma: ({iv['lower']:.6g}, 0), bound by {iv['binding']}")
    if "walls" in d:
        lines.append(f"mesh level {d['mesh_level']}, walls near 0:")
        ws = sorted(d["walls"], key=lambda w: abs(w["rate"]))[:9]
        for w in sorted(ws, key=lambda w: w["rate"]):
            kinds = sorted({s["kind"] for s in w["sources"]})
            mult = "-" if w["multiplicity"] is None else w["multiplicity"]
            lines.append(f"  {w['rate']:+.6f}  mult {mult}  from {', '.join(kinds)}")
    lines.append("checks:")
    for c in d["checks"]:
        lines.append(f"  [{'pass' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    return "\n".join(lines)


# ---------------------------------------------------------- matrices, plots

def dump_matrices(fe, directory, prefix=""):
    """Write every FE matrix as a MatrixMarket coordinate file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, A in fe.as_dict().items():
        p = directory / f"{prefix}{name}.mtx"
        scipy.io.mmwrite(str(p), A.tocoo())
        paths.append(p)
    return paths


PLOT_COLUMNS = ("level", "dof", "lambda1", "min_abs_curl", "lambda1_gap", "curl_gap")


def plot_rows(levels, oracle=None):
    """Rows for ``emit_plot_data``.

    ``levels`` is a sequence of ``(level, dof, lambda1, min_abs_curl)``;
    ``oracle`` an optional ``(lambda1, |gamma|)`` pair of continuum values.
    """
    if len(levels) < 2:
        raise ValueError("need >=2 levels")
    rows = []
    for lev, dof, lam, gam in levels:
        row = [int(lev), int(dof), float(lam), float(gam)]
        if oracle is not None:
            row += [abs(lam - oracle[0]) / oracle[0], abs(gam - oracle[1]) / oracle[1]]
        rows.append(row)
    return rows


def emit_plot_data(levels, path=None, oracle=None):
    """Whitespace-separated columns, one row per refinement level."""
    rows = plot_rows(levels, oracle)
    cols = PLOT_COLUMNS if oracle is not None else PLOT_COLUMNS[:4]
    lines = ["# " + " ".join(cols)]
    for r in rows:
        lines.append(" ".join(str(x) if isinstance(x, int) else f"{x:.12g}" for x in r))
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
