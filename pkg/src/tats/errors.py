"""Exception hierarchy shared across the package.

The split mirrors how failures are reported to callers: configuration
problems are caught before any work starts, data problems surface while
reading or aligning inputs, and numeric problems surface during fitting
or evaluation. The command line maps them to distinct exit codes.
"""


class TatsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TatsError):
    """Invalid parameter or option combination (usage error)."""


class DataError(TatsError):
    """Input data is missing, malformed, or misaligned."""


class NumericError(TatsError):
    """A computation could not be completed (degenerate fit, division by zero)."""
