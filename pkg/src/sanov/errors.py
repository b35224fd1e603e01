"""Exception hierarchy shared by all modules."""


class SanovError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SanovError, ValueError):
    """Alphabet sizes of the operands do not agree."""


class ValidationError(SanovError, ValueError):
    """An input value violates a type invariant."""


class PreconditionError(SanovError, ValueError):
    """An operation was called outside its stated precondition."""


class CapacityError(SanovError):
    """An enumeration would exceed the configured budget."""

    def __init__(self, message, required, budget):
        super().__init__(message)
        self.required = required
        self.budget = budget


class EmptyEventError(SanovError):
    """No type of the given sample size lies in the constraint set."""


class InfeasibleError(SanovError):
    """The constraint set contains no distribution.

    ``certificate_index`` is the smallest ``i`` such that constraints
    ``0..i`` are already jointly infeasible.
    """

    def __init__(self, message, certificate_index, achievable_range=None):
        super().__init__(message)
        self.certificate_index = certificate_index
        self.achievable_range = achievable_range


class InfiniteDivergenceError(SanovError):
    """Every feasible distribution puts mass where the reference has none."""


class ConvergenceError(SanovError):
    """The projection solver did not reach its tolerance."""
