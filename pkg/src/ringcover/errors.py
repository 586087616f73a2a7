"""Exception hierarchy shared by all modules."""


class RingcoverError(Exception):
    pass


class InvalidArgument(RingcoverError, ValueError):
    pass


class InvalidState(RingcoverError):
    pass


class InternalError(RingcoverError):
    """A construction produced output violating its own postconditions."""


class ConfigurationError(RingcoverError):
    pass


class CertificationError(RingcoverError):
    pass


class BudgetExceeded(RingcoverError):
    """Raised when a tile-count or wall-clock budget runs out."""

    def __init__(self, message, tiles_placed=0, elapsed=0.0):
        super().__init__(message)
        self.tiles_placed = tiles_placed
        self.elapsed = elapsed


class InvariantViolation(RingcoverError):
    pass


class ConstantsInfeasible(RingcoverError):
    pass


class CalibrationError(RingcoverError):
    pass
