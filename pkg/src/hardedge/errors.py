"""Exception types shared across the package."""


class HardEdgeError(Exception):
    """Base class for every error raised by this package."""


class StepLimitExceeded(HardEdgeError):
    pass


class NonFiniteState(HardEdgeError):
    pass


class NonFiniteValue(HardEdgeError):
    pass


class DomainError(HardEdgeError, ValueError):
    pass


class SingularInput(HardEdgeError, ValueError):
    pass


class ShootingFailed(HardEdgeError):
    pass


class RangeError(HardEdgeError, ValueError):
    pass


class ConstraintViolated(HardEdgeError):
    pass


class InstabilityDetected(HardEdgeError):
    pass


class GridTooCoarse(HardEdgeError, ValueError):
    pass


class EmptySample(HardEdgeError, ValueError):
    pass


class ConvergenceFailed(HardEdgeError):
    pass
