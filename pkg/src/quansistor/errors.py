"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad input, CLI exit
code 2) and ``NumericalError`` (an algorithm failed its own checks, CLI exit
code 3).
"""


class QuansistorError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QuansistorError, ValueError):
    pass


class NumericalError(QuansistorError, ArithmeticError):
    pass


# -- validation ---------------------------------------------------------------

class NonHermitian(ValidationError):
    pass


class BadClassIndex(ValidationError):
    def __init__(self, q):
        super().__init__(f"BadClassIndex: q={q!r} is not in {{0, 1, 2, 3}}")
        self.q = q


class DimensionMismatch(ValidationError):
    pass


class ZeroLink(ValidationError):
    def __init__(self, j, k):
        super().__init__(f"ZeroLink: link ({j},{k}) vanishes, its phase is undefined")
        self.link = (j, k)


class NonzeroMean(ValidationError):
    pass


class EmptySchedule(ValidationError):
    pass


class BiasedNoise(ValidationError):
    pass


class BadCoupling(ValidationError):
    pass


class InsideBand(ValidationError):
    pass


class ClassMismatch(ValidationError):
    pass


class SizeLimit(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NoPair(ValidationError):
    pass


class OffsetViolation(ValidationError):
    pass


class DispersiveGuard(ValidationError):
    pass


# -- numerical ----------------------------------------------------------------

class NoConvergence(NumericalError):
    pass


class RootCountMismatch(NumericalError):
    pass


class FlatnessViolation(NumericalError):
    pass
