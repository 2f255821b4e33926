"""Exception types raised across the package."""


class EvasionError(Exception):
    """Base class for all package errors."""


class CoincidentPositions(EvasionError, ValueError):
    """Prey and predator occupy the same point, so the escape wedge has no heading."""


class InvalidParameter(EvasionError, ValueError):
    pass


class OutOfDomain(EvasionError, ValueError):
    pass


class NotRadial(EvasionError, TypeError):
    pass


class QuadratureFailure(EvasionError, RuntimeError):
    pass


class NoConvergence(EvasionError, RuntimeError):
    """The eigensolver hit its iteration cap.

    The last iterate is kept on ``last`` so callers can inspect it.
    """

    def __init__(self, max_iter, last=None):
        super().__init__(f"inverse iteration did not converge in {max_iter} iterations")
        self.max_iter = max_iter
        self.last = last


class LengthMismatch(EvasionError, ValueError):
    pass


class CaptureEvent(EvasionError):
    """Predator landed on the prey; the wedge for the next step is undefined."""


class IndexOutOfRange(EvasionError, IndexError):
    pass
