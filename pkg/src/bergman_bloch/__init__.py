"""Numerical verification of the norms of the weighted Bergman projection
from L^infinity of the unit ball of C^n onto the Bloch space."""

__version__ = "0.1.0"

from .integrate import MCConfig, MCEstimate, Params  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .norms import (  # noqa: E402
    bloch_opnorm,
    bloch_opnorm_lower,
    first_term,
    first_term_as_stated,
    radial_majorant,
    seminorm_opnorm,
)
from .specfun import ConvergenceError, DomainError  # noqa: E402

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "DomainError",
    "MCConfig",
    "MCEstimate",
    "Params",
    "bloch_opnorm",
    "bloch_opnorm_lower",
    "first_term",
    "first_term_as_stated",
    "radial_majorant",
    "seminorm_opnorm",
]
