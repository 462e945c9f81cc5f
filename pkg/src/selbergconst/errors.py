"""Exception types shared by every module.

The CLI maps these onto exit codes: domain and config problems exit 2,
resource problems exit 3.
"""


class SelbergError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SelbergError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(SelbergError, ValueError):
    """A parameter combination is not admissible."""


class ResourceError(SelbergError, RuntimeError):
    """A size, memory or event budget would be exceeded."""


class UnknownIdError(SelbergError, KeyError):
    """A catalog or constant identifier is not registered."""


class RegistrationError(SelbergError, RuntimeError):
    """A catalog entry failed its majorant spot check."""
