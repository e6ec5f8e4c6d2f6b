"""
Exception types raised by kitaev_lab operations.
All of them are ValueErrors so callers that only care about bad input can
catch the builtin.
"""


class KitaevLabError(ValueError):
    """Base class for every error raised by the library."""


class ResourceLimitError(KitaevLabError):
    """A configured cap (qubits, exhaustive N, exact-loss M) was exceeded."""


class ShapeError(KitaevLabError):
    """N (or M) does not have the shape a closed form requires."""


class DimensionError(KitaevLabError):
    """Seed off-diagonals do not match the profile length."""


class SamplingError(ResourceLimitError):
    """Rejection sampling hit its iteration cap."""


class ConfigurationError(KitaevLabError):
    """Invalid KPL_* setting."""


class UsageError(KitaevLabError):
    """Malformed command-line input."""
