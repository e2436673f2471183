"""Exception types raised across the package."""


class AimSpectraError(Exception):
    """Base class for all package errors."""


# numerics
class PoleAtCenterError(AimSpectraError, ValueError):
    pass


class BracketError(AimSpectraError, ValueError):
    pass


class EvaluationError(AimSpectraError, ArithmeticError):
    pass


class NotUnimodalError(AimSpectraError, ValueError):
    pass


# odepoly
class DimensionError(AimSpectraError, ValueError):
    pass


class DegreeDegenerateError(AimSpectraError, ArithmeticError):
    pass


class DegenerateParameterError(AimSpectraError, ArithmeticError):
    pass


# aim
class SeedPointError(AimSpectraError, ValueError):
    pass


class InsufficientOrderError(AimSpectraError, ValueError):
    pass


class UnsupportedParameterError(AimSpectraError, ValueError):
    pass


class BracketFailureError(AimSpectraError, RuntimeError):
    """No sign change of the termination function was found.

    ``trace`` holds the (E, sign) samples of the failed scan.
    """

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class NonConvergenceError(AimSpectraError, RuntimeError):
    pass


# exact / bounds / oracle
class NotExactlySolvableError(AimSpectraError, ValueError):
    pass


class UnboundedBelowError(AimSpectraError, ValueError):
    pass


class OracleDivergenceError(AimSpectraError, RuntimeError):
    pass
