"""Moduli dimensions of asymptotically cylindrical coassociative 4-folds.

Exact cohomology of a triangulated pair (C, L), the cup form on the image of
compactly supported cohomology, Whitney-form spectra of the link and the
Fredholm walls they produce.
"""
from .cohomology import betti, dim_v_direct, dim_v_formula, les_of_pair, relative_betti
from .exact import BACKEND
from .generators import generate_mesh
from .intersection import cup_pair, gram_on_V, signature_split
from .report import (
    assemble_report,
    full_operator_report,
    h3_kernel_check,
    linearized_operator_report,
    moduli_dimension,
)
from .simplicial import boundary_matrix, build_complex, extract_pair, subdivide
from .spectral import (
    assemble,
    coexact_consistency,
    curl_spectrum,
    laplacian0_spectrum,
    laplacian1_spectrum,
)
from .walls import (
    admissible_gamma,
    full_operator_index_jump,
    invariant_kernel_at_zero,
    wall_multiplicity,
    wall_set,
)

__version__ = "0.1.0"
