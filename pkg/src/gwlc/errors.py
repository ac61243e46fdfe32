"""Exception hierarchy shared by all modules."""


class GWLCError(ValueError):
    """Base class for every validation or domain error raised by gwlc."""


class NegativeProbabilityError(GWLCError):
    pass


class SumNotOneError(GWLCError):
    pass


class ZeroExtinctionError(GWLCError):
    pass


class DegenerateUnaryError(GWLCError):
    pass


class NotCriticalError(GWLCError):
    pass


class OrderTooSmallError(GWLCError):
    pass


class ZeroConstantTermError(GWLCError, ZeroDivisionError):
    pass


class OutOfRangeError(GWLCError):
    pass


class EllTooSmallError(GWLCError):
    pass


class MalformedEncodingError(GWLCError):
    pass


class ZeroAcceptedError(GWLCError, RuntimeError):
    """Rejection sampler spent its trial budget without a single acceptance."""
