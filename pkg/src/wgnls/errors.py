"""Exception hierarchy.

Validation errors (bad input, bad geometry, bad config) map to CLI exit code 1,
numerical failures (non-finite state, drift, under-resolution) to exit code 2.
"""


class WaveguideError(Exception):
    pass


class ValidationError(WaveguideError, ValueError):
    pass


class NumericalError(WaveguideError, ArithmeticError):
    pass


class ConfigError(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class EpsilonOutOfRange(ValidationError):
    pass


class DegenerateMetric(ValidationError):
    pass


class ClosureViolation(ValidationError):
    pass


class GeometryUnavailable(ValidationError):
    pass


class SelfIntersection(ValidationError):
    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class NonUnitSpeed(NumericalError):
    pass


class NonFiniteState(NumericalError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class StepRejected(NonFiniteState):
    pass


class MassDriftExceeded(NumericalError):
    pass


class ResolutionInsufficient(NumericalError):
    pass
