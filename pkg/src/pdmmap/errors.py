"""Exception hierarchy shared by all pdmmap modules."""


class PdmError(Exception):
    """Base class for all library errors."""


class DomainError(PdmError, ValueError):
    """Evaluation requested outside a map's or potential's valid region.

    Carries the offending point when available.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SingularityError(DomainError):
    """Evaluation at (or too close to) a singular point: pole, branch
    point, or a zero of f' where the mass function diverges."""


class BranchCutError(DomainError):
    """Evaluation on the branch cut of a principal-branch function."""


class CapacityError(PdmError, ValueError):
    """A hard cap (polynomial degree, quantum number) was exceeded."""


class CountError(PdmError, ValueError):
    """Fewer bound states exist than were requested."""

    def __init__(self, message, available):
        super().__init__(message)
        self.available = available


class ExtentError(PdmError, ValueError):
    """Grid extent is too small: boundary tail mass exceeds the budget."""


class ConfigError(PdmError, ValueError):
    """Malformed or invalid CLI configuration document."""
