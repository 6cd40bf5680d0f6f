"""Exception types shared across the package."""


class FracEigError(Exception):
    """Base class for all package errors."""


class ConfigError(FracEigError):
    """Invalid or malformed experiment configuration (CLI exit code 2)."""


class BudgetError(FracEigError):
    """Grid or dense-solver size exceeds the configured budget (exit code 4)."""


class GridMismatchError(FracEigError):
    """Operands live on different grids or dimensions disagree."""


class ConstraintError(FracEigError):
    """Degenerate, empty, or sign-inconsistent weighted constraint."""


class AdmissibilityError(FracEigError):
    """Weight not admissible on the requested domain (no positive set)."""


class SolverError(FracEigError):
    """Eigenvalue solver failure (non-convergence, step-rule breakdown; exit 3)."""


class StudyError(FracEigError):
    """Parameter study aborted; carries the rows completed so far."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = rows or []
