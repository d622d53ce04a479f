"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """An enumeration or scan would exceed its configured resource cap."""


class PrecisionError(ArithmeticError):
    """Requested accuracy cannot be certified at the working precision."""


class CurveParseError(ValueError):
    """Curve expression rejected by the polynomial grammar."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DegenerateCurveError(ValueError):
    """The curve is a union of coordinate fibers; the sieve hypothesis fails."""


class InfeasibleGridError(ValueError):
    """No epsilon grid point leaves a positive exponent gap."""
