"""Exception hierarchy shared by all analysis modules."""


class L0LabError(Exception):
    """Base class for analysis failures."""


class InvalidInputError(L0LabError, ValueError):
    """Malformed or inconsistent input (wrong shapes, negative arguments, bad indices)."""


class ResourceLimitError(L0LabError):
    """Support enumeration would exceed the configured budget."""


class InfeasibleError(L0LabError):
    """The residual bound is below the smallest attainable residual."""

    def __init__(self, message, sigma_star):
        super().__init__(message)
        self.sigma_star = float(sigma_star)


class PreconditionError(L0LabError):
    """An analytic precondition (e.g. a condition on the penalty function) does not hold."""


class DomainError(L0LabError):
    """Parameter lies outside the range an analysis is defined on."""
