"""Exception types raised by the library."""


class Wl1Error(Exception):
    """Base class for all library errors"""


class ParameterError(Wl1Error, ValueError):
    """A precondition or range check on an argument failed"""


class DomainError(Wl1Error, ArithmeticError):
    """A formula was evaluated outside the region where it is defined"""


class EnumerationBudgetError(Wl1Error, RuntimeError):
    """Exact RIC enumeration would exceed the configured support budget"""

    def __init__(self, n_supports, budget, hint=None):
        self.n_supports = n_supports
        self.budget = budget
        message = (
            f"exact enumeration needs {n_supports} supports, budget is {budget}"
        )
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)


class UnsupportedGeometryError(ParameterError):
    """The requested construction is only defined for d = 1"""


class SolverError(Wl1Error, RuntimeError):
    """The optimisation backend failed in a way no status describes"""
