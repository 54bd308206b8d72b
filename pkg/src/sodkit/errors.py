"""Exception hierarchy shared by every sodkit module."""


class SodkitError(Exception):
    """Base class for all sodkit errors."""


class DomainMismatch(SodkitError, TypeError):
    pass


class NotDivisible(SodkitError, ArithmeticError):
    pass


class DegreeTooLow(SodkitError, ValueError):
    pass


class EqualSlice(SodkitError, ValueError):
    pass


class DivisionByZero(SodkitError, ZeroDivisionError):
    pass


class PrecisionExhausted(SodkitError, ArithmeticError):
    pass


class ZeroPolynomial(SodkitError, ValueError):
    pass


class NotSimpleRoot(SodkitError, ValueError):
    pass


class NotARoot(SodkitError, ValueError):
    pass


class BadModulus(SodkitError, ValueError):
    pass


class HypothesisFailed(SodkitError):
    """A precondition of a verified statement does not hold.

    ``hypothesis`` names the violated condition so reports can quote it.
    """

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis or message


class DuplicateNodes(SodkitError, ValueError):
    pass


class NotASolution(SodkitError, ValueError):
    pass


class ResolutionTooLow(SodkitError, ValueError):
    pass


class ScaleMismatch(SodkitError, ValueError):
    pass


class BadDenominator(SodkitError, ValueError):
    pass


class TooLarge(SodkitError, ValueError):
    pass


class CrossCheckFailed(SodkitError):
    pass


class ZeroOnContour(SodkitError, ValueError):
    pass


class DegenerateFiber(SodkitError, ValueError):
    pass
