"""Exception hierarchy shared by all ratstep modules."""


class RatstepError(Exception):
    """Base class for every error raised by ratstep."""


class InvalidRationalFunction(RatstepError, ValueError):
    pass


class EvaluationAtPole(RatstepError, ZeroDivisionError):
    pass


class PoleInRightHalfClosure(RatstepError, ValueError):
    """A pole 1/w has Re(w) <= 0, so (I - tau*w*A) may be singular."""


class RootFindingFailure(RatstepError, ArithmeticError):
    pass


class OrderExceedsCap(RatstepError, ArithmeticError):
    pass


class DimensionMismatch(RatstepError, ValueError):
    pass


class SingularShift(RatstepError, ArithmeticError):
    pass


class IllConditionedNodes(RatstepError, ArithmeticError):
    pass


class StepSizeAboveThreshold(RatstepError, ValueError):
    pass


class ImaginaryResidueTooLarge(RatstepError, ArithmeticError):
    """Raised when a real problem ends with a sizeable imaginary part."""


class NonPositiveError(RatstepError, ValueError):
    pass


class UnknownId(RatstepError, KeyError):
    pass
