"""
Errors
Exception hierarchy shared by the algebra, lattice and simulation modules.
Each concrete error also derives from the closest built-in so callers may
catch either.
"""


class PncError(Exception):
    """Base class for every error raised by this package."""


class GaussianDivisionByZero(PncError, ZeroDivisionError):
    pass


class InvalidArgumentError(PncError, ValueError):
    pass


class CapacityError(PncError, ValueError):
    """An exact routine was asked for more work than its configured bound."""


class UseStructuredDecoderError(CapacityError):
    """Exact nearest-point search refused; the lattice needs its own decoder."""


class RankDeficientError(PncError, ValueError):
    pass


class NotInvertibleError(PncError, ValueError):
    pass


class InvalidLatticeError(PncError, ValueError):
    pass


class NotALatticePointError(PncError, ValueError):
    pass


class PowerConstraintError(PncError, RuntimeError):
    pass


class ConfigError(PncError, ValueError):
    pass
