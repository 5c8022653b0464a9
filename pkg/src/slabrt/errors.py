"""Exception types shared across the solvers and the CLI."""


class SolverError(Exception):
    """Base class for numerical failures during a run."""


class BlowUpError(SolverError):
    """A field became non-finite (typically a violated CFL bound)."""

    def __init__(self, message: str, step: int | None = None, operator: str | None = None):
        super().__init__(message)
        self.step = step
        self.operator = operator


class NumericalError(SolverError):
    """A linear-algebra kernel failed (e.g. a non-SPD implicit system)."""


class ConfigError(Exception):
    """Invalid, unknown, or inconsistent configuration input."""
