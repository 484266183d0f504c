"""Exception hierarchy for the solver.

Every error raised on purpose by this package derives from :class:`EntropicLPError`.
Input problems subclass :class:`InputError` (CLI exit code 2) and numerical
breakdowns subclass :class:`NumericalError` (CLI exit code 3).
"""


class EntropicLPError(Exception):
    """Base class for all package errors."""


class InputError(EntropicLPError, ValueError):
    pass


class NumericalError(EntropicLPError, ArithmeticError):
    pass


class NonPositivePrior(InputError):
    pass


class PriorNotNormalized(InputError):
    pass


class TooFewActions(InputError):
    pass


class NonFiniteCost(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class InvalidPolicy(InputError):
    pass


class SupportViolation(InputError):
    pass


class InvalidSupport(InputError):
    pass


class BoundaryPoint(InputError):
    pass


class NotInterior(InputError):
    pass


class InvalidLambda(InputError):
    pass


class InvalidConfig(InputError):
    pass


class NotReducible(InputError):
    pass


class TooLarge(InputError):
    pass


class EmptySupport(InputError):
    pass


class NotAttainable(EntropicLPError):
    pass


class DegenerateCosts(EntropicLPError):
    """Raised when the normalized cost tensor is identically zero.

    Any feasible point is then optimal. The shifted instance and the per-state
    offsets are attached so callers can short-circuit without recomputing.
    """

    def __init__(self, message, instance=None, offsets=None):
        super().__init__(message)
        self.instance = instance
        self.offsets = offsets


class RejectionExhausted(EntropicLPError):
    pass


class NumericalUnderflow(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class MaxOuterExceeded(NumericalError):
    pass


class MaxInnerExceeded(NumericalError):
    pass
