"""Exception hierarchy shared by all pobs modules."""


class PobsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PobsError):
    """Invalid grid, run configuration, or CLI input."""


class ParameterError(PobsError):
    """Problem parameters outside their admissible range."""


class CoefficientError(PobsError):
    """Coefficient field violating positivity or bound requirements."""


class ShapeError(PobsError):
    """Mismatched grids or array shapes between fields."""


class NumericError(PobsError):
    """Non-finite values encountered during computation."""


class SeedError(PobsError):
    """Descent-seed construction failed (no admissible ray direction)."""


class DomainError(PobsError):
    """Requested ball or radius escapes the interior margin of the grid."""


class FitError(PobsError):
    """Not enough usable data points for a least-squares fit."""


class FieldIOError(PobsError):
    """Field-file or report persistence failure."""

    def __init__(self, message, byte_offset=None):
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset
