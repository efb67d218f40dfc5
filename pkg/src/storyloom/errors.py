"""Shared exception base for the package.

Every domain error raised by storyloom subclasses :class:`StoryloomError`
so the CLI can map any of them to exit code 1.  Module-specific errors
live next to the code that raises them.
"""


class StoryloomError(Exception):
    """Base class for all storyloom domain errors."""


class ConfigError(StoryloomError, ValueError):
    """A configuration value violates its invariants."""
