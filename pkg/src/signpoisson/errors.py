"""Exception types raised by the package."""


class SignPoissonError(Exception):
    """Base class for all package errors."""


class ConfigError(SignPoissonError, ValueError):
    """Invalid input description (bad shape, unknown config key, ...)."""


class EmptyRaster(SignPoissonError):
    """No cell center falls inside the domain."""


class CoincidentPoints(SignPoissonError, ValueError):
    pass


class PointOutsideWedge(SignPoissonError, ValueError):
    pass


class MassInfeasible(SignPoissonError, ValueError):
    pass


class NotNonnegative(SignPoissonError, ValueError):
    pass


class NumericalFailure(SignPoissonError, RuntimeError):
    """Base for failures of an iterative numerical method."""


class NonConvergence(NumericalFailure):
    pass


class TruncationFailure(NumericalFailure):
    pass
