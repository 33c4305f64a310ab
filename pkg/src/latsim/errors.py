"""Exception hierarchy; the CLI maps these onto process exit codes."""


class LatsimError(Exception):
    """Base class for all package errors."""


class DataError(LatsimError):
    """Malformed, empty, or otherwise unusable input data (exit code 2)."""


class GenerationError(LatsimError):
    """Synthetic graph targets are infeasible as requested (exit code 2)."""


class ConvergenceError(LatsimError):
    """An iterative numerical method failed to converge (exit code 3)."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
