"""Exception types raised across the package."""


class QCTimeError(Exception):
    """Base class for all package errors."""


class InputError(QCTimeError, ValueError):
    """Bad input; the CLI maps these to exit code 2."""


class DimensionMismatch(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotAntiHermitian(InputError):
    pass


class EmptyGenerators(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class InsufficientOrder(InputError):
    pass


class ParamConstraintViolated(InputError):
    pass


class GeneratorOutsideAlgebra(InputError):
    pass


class SmallTimeGateFailed(InputError):
    pass


class DegenerateDenominator(InputError):
    pass


class ConvergenceGateFailed(QCTimeError):
    pass


class NormGateFailed(QCTimeError):
    pass


class MaxSweepsExceeded(QCTimeError):
    pass


class GateRestartLimit(QCTimeError):
    pass


class NoAdmissibleCandidate(QCTimeError):
    pass


class ZeroDeviation(QCTimeError):
    pass


class DiagonalizationMismatch(QCTimeError):
    pass
