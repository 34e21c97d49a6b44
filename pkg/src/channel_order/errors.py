"""Exception hierarchy shared by every module of the package."""


class ChannelOrderError(Exception):
    """Base class for all errors raised by :mod:`channel_order`."""


class DimensionMismatch(ChannelOrderError, ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class NotHermitian(ChannelOrderError, ValueError):
    pass


class NotPsd(ChannelOrderError, ValueError):
    pass


class ValidationError(ChannelOrderError, ValueError):
    """An object violates one of its value invariants (row sums, trace, ...)."""


class ParseError(ChannelOrderError, ValueError):
    """Malformed JSON input."""


class NumericalFailure(ChannelOrderError, RuntimeError):
    """A solver could not meet its residual contract."""


class IterationLimit(NumericalFailure):
    pass


class Infeasible(ChannelOrderError):
    """An optimization problem has no feasible point.

    ``certificate`` holds whatever evidence the solver produced: a Farkas
    vector for LPs, a dual ray or a linear-inconsistency residual for SDPs.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class Unbounded(ChannelOrderError):
    pass


class NotInformationallyComplete(ChannelOrderError, ValueError):
    pass


class IllConditionedFrame(NumericalFailure):
    pass


class OutputsDoNotCommute(ChannelOrderError, ValueError):
    pass


class MatchingInfeasible(Infeasible):
    """No POVM reproduces the requested statistics.

    ``margin`` is the optimal value of ``max s`` subject to ``P^x >= s*1``;
    negative means the matching is infeasible by that much.  It is ``None``
    when the linear statistics equations alone are inconsistent.
    """

    def __init__(self, message, margin=None, certificate=None):
        super().__init__(message, certificate)
        self.margin = margin


class NotDegradable(ChannelOrderError):
    """Raised by :func:`find_degrader`; carries the :class:`GapCertificate`."""

    def __init__(self, certificate):
        super().__init__(f"degradation gap {certificate.gap:.3e} exceeds tolerance")
        self.certificate = certificate


class NotLessNoisy(ChannelOrderError):
    def __init__(self, message, cause=None):
        super().__init__(message)
        self.cause = cause


class NotExtendable(ChannelOrderError):
    def __init__(self, message, cause=None):
        super().__init__(message)
        self.cause = cause
