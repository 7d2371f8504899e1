"""Exception types shared across the package."""


class BitspectraError(Exception):
    """Base class for all package-specific errors."""


class SizeLimitError(BitspectraError):
    """Input exceeds a configured size cap. The message names the limit."""


class NumericalPrecisionError(BitspectraError):
    """A floating-point shortcut drifted too far from the exact result."""


class InternalCheckError(BitspectraError):
    """Two independent computation paths disagreed. Always a bug."""


class CalibrationError(BitspectraError):
    """Labeled data is insufficient or degenerate for threshold fitting."""
