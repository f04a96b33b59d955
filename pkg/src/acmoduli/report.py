"""Moduli dimension and the kernel/cokernel bookkeeping around it.

Every number here except the admissible rate interval is topological and
computed exactly. The spectral part is optional: without a link mesh the
report is produced in topology-only mode.
"""
from dataclasses import dataclass, field

from .cohomology import dim_v_formula, les_of_pair, poincare_duality_defects
from .intersection import gram_on_V
from .spectral import assemble, curl_spectrum, laplacian0_spectrum
from .walls import (
    admissible_gamma,
    full_operator_index_jump,
    invariant_kernel_at_zero,
    wall_set,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ModuliReport:
    """Headline numbers of a manifold pair plus named pass/fail identities.

    Spectral fields (``walls``, ``spectra``) are ``None`` in topology-only
    mode, and ``admissible_gamma`` is then the string ``"topology-only"``.
    """

    name: str
    dim_moduli: int
    ker_dim: int
    coker_dim: int
    index: int
    full_op_ker_gamma: int
    full_op_ker_minus_gamma: int
    harmonic_image_dims: list
    b_C: list
    b_L: list
    b_cs: list
    les_nodes: list
    dim_V: int
    v_plus: int
    v_minus: int
    gram: list
    beta: float
    admissible_gamma: object = "topology-only"
    walls: object = None
    spectra: dict = None
    invariant_kernel_at_zero: int = 0
    full_index_jump: int = 0
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)


class StageError(Exception):
    """An upstream computation failed; ``stage`` names which one."""

    def __init__(self, stage, error):
        super().__init__(f"{stage}: {type(error).__name__}: {error}")
        self.stage = stage
        self.error = error


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except Exception as e:
        raise StageError(name, e) from e


def moduli_dimension(pair, profile=None):
    """dim V+ for the cup form on the image of H^2_cs in H^2."""
    profile = profile or les_of_pair(pair)
    return gram_on_V(pair, profile=profile).v_plus


def linearized_operator_report(pair, profile=None, pairing=None):
    """(kernel, cokernel, index) of the linearised operator for small gamma < 0."""
    profile = profile or les_of_pair(pair)
    pairing = pairing or gram_on_V(pair, profile=profile)
    ker = pairing.v_plus
    coker = profile.b_L[0] - profile.b_C[0] + profile.b_C[1]
    return ker, coker, ker - coker


def full_operator_report(pair, profile=None):
    """Kernel of d + d* at rates gamma and -gamma, and the per-degree image dims.

    At a small negative rate the kernel is the image of compactly supported
    cohomology in ordinary cohomology; crossing 0 adds one solution for every
    cohomology class of the link.
    """
    profile = profile or les_of_pair(pair)
    dims = profile.image_dims()
    ker = sum(dims)
    return ker, ker + sum(profile.b_L), dims


def h3_kernel_check(profile):
    """Kernel of H^3_cs -> H^3 against b0(L) - b0(C) + b1(C) - b3(C)."""
    bC, bL = profile.b_C, profile.b_L
    expected = bL[0] - bC[0] + bC[1] - bC[3]
    got = profile.h3_kernel_dim()
    return Check("h3_kernel", got == expected, f"LES {got}, formula {expected}")


def assemble_report(pair, mesh=None, beta=-1.0, eigs=12, orientation="induced",
                    method="auto", wall_rtol=None, residual_rtol=None):
    """Full report for a pair, with spectral data when a link mesh is given."""
    profile = _stage("cohomology", les_of_pair, pair)
    pairing = _stage("intersection_form", gram_on_V, pair, profile=profile)
    ker, coker, index = linearized_operator_report(pair, profile, pairing)
    fker, fker_minus, dims = full_operator_report(pair, profile)
    bL = profile.b_L
    jump = full_operator_index_jump(bL)
    checks = []
    dv = dim_v_formula(profile, check=False)
    checks.append(Check("dim_V_two_ways", dv == profile.dim_V,
                        f"direct {profile.dim_V}, alternating sum {dv}"))
    bad = {k: v for k, v in profile.exactness_defects.items() if v}
    checks.append(Check("les_exact", not bad, str(bad) if bad else "all nodes"))
    pc, pl = poincare_duality_defects(profile)
    checks.append(Check("poincare_duality", not any(pc) and not any(pl),
                        f"C {pc}, L {pl}"))
    checks.append(Check("signature_split", pairing.v_plus + pairing.v_minus == profile.dim_V,
                        f"{pairing.v_plus} + {pairing.v_minus} vs {profile.dim_V}"))
    checks.append(Check("consistency_square", ker == pairing.v_plus,
                        f"dim V+ {pairing.v_plus}, kernel {ker}"))
    checks.append(Check("full_kernel_jump", fker_minus - fker == sum(bL),
                        f"{fker_minus} - {fker} vs {sum(bL)}"))
    checks.append(Check("full_index_jump", jump == 2 * (fker_minus - fker),
                        f"{jump} vs 2 x {fker_minus - fker}"))
    checks.append(h3_kernel_check(profile))
    rep = ModuliReport(
        name=pair.name or "", dim_moduli=pairing.v_plus, ker_dim=ker, coker_dim=coker,
        index=index, full_op_ker_gamma=fker, full_op_ker_minus_gamma=fker_minus,
        harmonic_image_dims=dims, b_C=profile.b_C, b_L=bL, b_cs=profile.b_cs,
        les_nodes=profile.les_nodes, dim_V=profile.dim_V, v_plus=pairing.v_plus,
        v_minus=pairing.v_minus, gram=pairing.gram, beta=beta,
        invariant_kernel_at_zero=invariant_kernel_at_zero(bL), full_index_jump=jump,
        checks=checks)
    if mesh is not None:
        _spectral_part(rep, mesh, eigs, orientation, method, wall_rtol, residual_rtol)
    return rep


def _spectral_part(rep, mesh, eigs, orientation, method, wall_rtol, residual_rtol):
    from .cohomology import betti
    from .spectral import RESIDUAL_RTOL
    from .walls import WALL_RTOL

    b_mesh = _stage("mesh_cohomology", betti, mesh.complex)
    rep.checks.append(Check("mesh_matches_link", list(b_mesh) == list(rep.b_L),
                            f"mesh {list(b_mesh)}, link {list(rep.b_L)}"))
    rtol = residual_rtol or RESIDUAL_RTOL
    fe = _stage("assemble", assemble, mesh, orientation)
    l0 = _stage("laplace0", laplacian0_spectrum, mesh, eigs, fe, method, rtol)
    curl = _stage("curl", curl_spectrum, mesh, eigs, orientation, fe, method, rtol)
    ws = wall_set(l0, curl, rtol=wall_rtol or WALL_RTOL, orientation=orientation)
    rep.checks.append(Check("laplace0_zero_modes", l0.zero_mode_count == b_mesh[0],
                            f"{l0.zero_mode_count} vs b0 {b_mesh[0]}"))
    expected = b_mesh[1] + mesh.complex.vertex_count - b_mesh[0]
    rep.checks.append(Check("curl_zero_modes", curl.zero_mode_count >= expected,
                            f"{curl.zero_mode_count} >= {expected}"))
    rep.checks.append(Check("nonzero_walls_positive",
                            all(w.multiplicity >= 1 for w in ws.walls if w.rate != 0), ""))
    rep.spectra = {"lambda0": l0, "curl": curl, "mesh_level": mesh.level}
    rep.walls = ws
    rep.admissible_gamma = admissible_gamma(ws, rep.beta)
