"""Exception and warning types shared across the package."""


class StalabError(Exception):
    """Base class for all package-specific errors."""


class SequenceError(StalabError, ValueError):
    """Invalid interferometer sequence or timeline data."""


class InconsistentBlochCount(SequenceError):
    """Bloch oscillation count, period and window duration disagree."""


class OverlappingSegments(SequenceError):
    """Two acceleration segments on the same arm overlap in time."""


class NotInterfering(StalabError):
    """Arms end with different velocities, so no far-field fringe exists."""


class ZeroArea(StalabError):
    """Space-time area is zero; the symmetric sensitivity ratio is undefined."""


class DegenerateSequence(StalabError):
    """Arm separation is identically zero; sensitivity ratios are undefined."""


class UnsupportedWaveform(StalabError, TypeError):
    """Time-dependent acceleration is not in polynomial + trigonometric form."""


class ToleranceNotMet(StalabError, ArithmeticError):
    """Numerical cross-check failed to converge to the requested tolerance."""


class SequenceFileError(StalabError, ValueError):
    """Sequence file cannot be parsed; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"field '{field}': {message}")


class ZeroAreaKickWarning(UserWarning):
    """A laser kick has no velocity component along the beam axis."""


class NonPerturbativeRotationWarning(UserWarning):
    """|Omega| * T is not small; the first-order rotation formula degrades."""
