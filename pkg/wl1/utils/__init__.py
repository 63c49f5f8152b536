from .errors import (DomainError, EnumerationBudgetError, ParameterError,
                     SolverError, UnsupportedGeometryError, Wl1Error)
from .rng import make_rng
from .validators import ceil_int, near_integer, require_integer

__all__ = [
    "Wl1Error",
    "ParameterError",
    "DomainError",
    "EnumerationBudgetError",
    "UnsupportedGeometryError",
    "SolverError",
    "make_rng",
    "ceil_int",
    "near_integer",
    "require_integer",
]
