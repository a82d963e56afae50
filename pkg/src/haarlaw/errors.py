"""Exception types raised by haarlaw."""


class HaarLawError(Exception):
    """Base class for all haarlaw errors."""


class InvalidSpectrum(HaarLawError, ValueError):
    pass


class InvalidArgument(HaarLawError, ValueError):
    pass


class PrecisionExceeded(HaarLawError, ArithmeticError):
    """A float evaluation could not reach the requested accuracy.

    Callers may retry with ``PrecisionPolicy.high()``.
    """


class NoDensity(HaarLawError, ValueError):
    """The law is a point mass and has no density function."""


class RequiresNonDegenerate(HaarLawError, ValueError):
    pass


class DegenerateLaw(HaarLawError, ValueError):
    """The operation needs a non-constant spectrum."""


class TooLarge(HaarLawError, ValueError):
    pass
