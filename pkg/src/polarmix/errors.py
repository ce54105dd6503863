"""Exception types raised across the package."""


class PolarError(Exception):
    """Base class for all errors raised by polarmix."""


class ZeroInverse(PolarError, ZeroDivisionError):
    pass


class ShapeError(PolarError, ValueError):
    pass


class SingularError(PolarError, ValueError):
    pass


class PivotError(PolarError, ValueError):
    pass


class NotMixingError(PolarError, ValueError):
    pass


class TooLargeError(PolarError, ValueError):
    pass


class AlphabetError(PolarError, ValueError):
    pass


class UnsupportedError(PolarError, ValueError):
    pass


class ValidationError(PolarError, ValueError):
    pass


class ParseError(PolarError, ValueError):
    pass


class NotSymmetricError(ValidationError):
    pass
