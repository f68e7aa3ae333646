"""
BANDEDGE Errors
===============
Exception hierarchy for the photonic library.

Version: 1.0
"""


class PhotonicError(Exception):
    """Base class for all numerical failures raised by the library."""
    pass


class DomainError(PhotonicError, ValueError):
    """Raised when an input violates an operation's precondition."""
    pass


class ScanResolutionError(PhotonicError):
    """Raised when two band edges fall inside one scan step."""
    pass


class DegenerateBandError(PhotonicError):
    """Raised at a degenerate band touching, where no unique edge mode exists."""
    pass


class WronskianError(PhotonicError):
    """Raised when the outgoing solutions of a finite stack are linearly dependent."""
    pass


class OracleOverflowError(PhotonicError):
    """Raised when the finite-stack propagation overflows (deep gap, too many periods)."""
    pass


class SampleCountError(PhotonicError):
    """Raised when too few valid log-log samples remain for a slope curve."""
    pass


class UnconvergedEstimateError(PhotonicError):
    """Raised when a prefactor is requested from an unconverged exponent estimate."""
    pass


class NoBandEdgeError(PhotonicError):
    """Raised when the requested band gap does not exist for the crystal."""
    pass
