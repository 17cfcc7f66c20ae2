class SpeedLimitError(ValueError):
    """Base class for all errors raised by the package."""


class NotHermitianError(SpeedLimitError):
    pass


class NoConvergenceError(SpeedLimitError):
    pass


class NotUnitaryError(SpeedLimitError):
    pass


class DimensionOverflowError(SpeedLimitError):
    pass


class DimMismatchError(SpeedLimitError):
    pass


class NotUnbiasedError(SpeedLimitError):
    pass


class NotQutritError(SpeedLimitError):
    pass


class BadKindError(SpeedLimitError):
    pass


class NotDensityMatrixError(SpeedLimitError):
    pass


class NotQubitError(SpeedLimitError):
    pass


class NotNormalizedError(SpeedLimitError):
    pass


class ZeroBlochVectorError(SpeedLimitError):
    pass


class ParallelVectorsError(SpeedLimitError):
    pass


class MaximallyMixedInputError(SpeedLimitError):
    pass


class TimeOutOfRangeError(SpeedLimitError):
    pass


class BadDimensionError(SpeedLimitError):
    pass


class NotDiagonalUnitaryError(SpeedLimitError):
    pass


class ZeroDenominatorError(SpeedLimitError):
    pass


class DimTooLargeError(SpeedLimitError):
    pass
