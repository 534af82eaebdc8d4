"""Exception types raised across the package."""


class DefstatError(Exception):
    """Base class for all package errors."""


class DimensionError(DefstatError, ValueError):
    """Vector dimension does not match what a norm or sequence expects."""


class WindowOrderError(DefstatError, ValueError):
    """A deferred window violates alpha(n) < theta(n) (or nesting)."""


class AmbiguousLimit(DefstatError):
    """More than one distinct candidate limit certified.

    Usually means the parameter grid or tolerance schedule is too coarse to
    separate the candidates.
    """

    def __init__(self, message, certified=None):
        super().__init__(message)
        self.certified = list(certified or [])


class ParseError(DefstatError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class GapError(ParseError):
    """Index column skips a value or does not start at 1."""


class DimError(ParseError):
    """Ragged records in a sequence file."""


class IndexOutOfRange(DefstatError, IndexError):
    """Index requested beyond the records held by a file-backed sequence."""


class ConfigError(DefstatError, ValueError):
    """Run configuration is malformed or inconsistent."""
