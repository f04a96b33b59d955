"""Exception hierarchy.

Each error carries the pipeline ``stage`` that raised it so the CLI and the
report can name the failed stage in diagnostics.
"""


class ACModuliError(Exception):
    stage = "general"


class ComplexError(ACModuliError, ValueError):
    stage = "simplicial_core"


class DuplicateSimplex(ComplexError):
    pass


class RepeatedVertexInSimplex(ComplexError):
    pass


class NotPseudomanifold(ComplexError):
    pass


class NonOrientable(ComplexError):
    pass


class ClosedComponent(ComplexError):
    """A connected component of the 4-complex has empty boundary."""


class DegenerateTetrahedron(ComplexError):
    stage = "spectral_link"


class ParseError(ComplexError):
    stage = "cli_io"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ExactnessViolation(ACModuliError, ArithmeticError):
    stage = "cohomology_engine"


class MismatchWithDirect(ACModuliError, ArithmeticError):
    stage = "cohomology_engine"


class NotACocycle(ACModuliError, ValueError):
    stage = "intersection_form"


class DegenerateForm(ACModuliError, ArithmeticError):
    stage = "intersection_form"


class SolverError(ACModuliError, RuntimeError):
    """Eigen-solver failed to converge or to meet the residual bound."""

    stage = "spectral_link"

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (achieved residual {residual:.3e})"
        super().__init__(message)
