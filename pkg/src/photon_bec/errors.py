"""Exception hierarchy; CLI exit codes hang off these classes."""


class ValidationError(ValueError):
    """Invalid parameters or config (exit code 1)."""

    exit_code = 1


class DomainError(ValidationError):
    """Input outside the domain of a formula, e.g. pump below cutoff."""


class SolverError(RuntimeError):
    """Root finder failed to converge (exit code 2)."""

    exit_code = 2

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class FitError(SolverError):
    """Not enough populated bins for a Bose-Einstein fit."""


class ConservationError(RuntimeError):
    """Particle number or energy drifted beyond tolerance (exit code 3)."""

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
