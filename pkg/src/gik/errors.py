"""Exception types shared across the package."""

from __future__ import annotations


class GikError(Exception):
    """Base class for every error raised by this package."""


class InvalidInstance(GikError, ValueError):
    pass


class NonMonotoneCapacities(InvalidInstance):
    pass


class NonPositiveWeight(InvalidInstance):
    pass


class NegativeProfit(InvalidInstance):
    pass


class DimensionMismatch(InvalidInstance):
    pass


class InvalidChain(GikError, ValueError):
    pass


class UnknownItem(GikError, KeyError):
    pass


class InfeasibleChain(GikError, ValueError):
    pass


class OverlappingChains(GikError, ValueError):
    pass


class OutOfRange(GikError, ValueError):
    pass


class InvalidEpsilon(GikError, ValueError):
    pass


class InstanceTooLarge(GikError, ValueError):
    pass


class PostconditionViolated(GikError, AssertionError):
    """A proven guarantee failed to hold; always indicates a bug."""


class InfeasibleAssignment(GikError, ValueError):
    pass


class NonIntegerWeights(GikError, ValueError):
    pass


class InvalidIndexSets(GikError, ValueError):
    pass


class BadParams(GikError, ValueError):
    pass


class BudgetExceeded(GikError):
    """Raised when a wall-clock deadline expires.

    ``partial`` holds the best feasible chain known at the moment the
    deadline fired, for the instance the raising call was working on.
    """

    def __init__(self, partial=None, message: str = "wall-clock budget exhausted"):
        super().__init__(message)
        self.partial = partial
