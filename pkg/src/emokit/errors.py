"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class EmokitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(EmokitError):
    """Invalid or inconsistent experiment/CLI configuration."""


class DataError(EmokitError):
    """Malformed input data: CSV layout, embedding files, score tables."""


class NumericError(EmokitError):
    """Non-finite values or degenerate numerics during computation."""
