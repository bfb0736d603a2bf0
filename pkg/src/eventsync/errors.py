"""Exception hierarchy used across the library.

Everything derives from :class:`EventSyncError` so callers can catch one
type at an API boundary.  Errors that signal bad user input additionally
derive from ``ValueError`` to behave well in generic code.
"""


class EventSyncError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateEventError(EventSyncError, ValueError):
    """Two events with identical (time, series, class)."""


class IndexOutOfRangeError(EventSyncError, ValueError):
    """A series or class index outside the declared ranges."""


class NonPositiveTauError(EventSyncError, ValueError):
    """A coincidence window that is zero or negative."""


class TooFewSeriesError(EventSyncError, ValueError):
    """An operation that needs at least two series got fewer."""


class ZeroWeightSumError(EventSyncError, ValueError):
    """Weighted aggregation with weights summing to zero."""


class NoEventsError(EventSyncError, ValueError):
    """An operation that requires events got an empty train."""


class EmptyMemberSetError(EventSyncError, ValueError):
    """A merged-class specification with no member classes."""


class GeometryMismatchError(EventSyncError, ValueError):
    """A pushed buffer does not match the declared stream geometry."""


class AdaptiveTauUnsupportedError(EventSyncError, ValueError):
    """Adaptive windows requested where only fixed windows are causal."""


class ZeroOccurrencesError(EventSyncError, ValueError):
    """Thresholded scoring with a zero occurrence count."""


class ConfigError(EventSyncError, ValueError):
    """Malformed or inconsistent run configuration."""


class DataFormatError(EventSyncError, ValueError):
    """Malformed input data file; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
