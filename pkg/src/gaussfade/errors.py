"""Exception taxonomy.

Physical-validity problems (unphysical states, impossible channel moments)
are kept separate from plain API misuse so callers can map them onto
different exit codes.
"""


class GaussfadeError(Exception):
    """Base class for all package errors."""


class DomainError(GaussfadeError, ValueError):
    """A value is outside its physical domain (non-PSD matrix, xi < 0, ...)."""


class ChannelError(GaussfadeError, ValueError):
    """Channel moments or a transmittance model violate their invariants."""


class MisuseError(GaussfadeError, TypeError):
    """An operation was called outside its stated precondition."""


class ConfigError(GaussfadeError, ValueError):
    """A run configuration failed strict parsing or schema validation."""
