"""Photon thermalization and Bose condensation in Kerr-nonlinear cavities."""

from photon_bec.errors import (
    ConservationError,
    DomainError,
    FitError,
    SolverError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "ConservationError",
    "DomainError",
    "FitError",
    "SolverError",
    "ValidationError",
]
