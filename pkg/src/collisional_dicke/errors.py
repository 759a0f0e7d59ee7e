"""Exception hierarchy shared by every module of the package."""


class DickeError(Exception):
    """Base class for all package errors."""


class DomainError(DickeError, ValueError):
    """An argument lies outside the domain of an operation."""


class ExcitationError(DomainError):
    """A bitmask does not carry the excitation number of its basis."""


class CapacityError(DickeError):
    """A request exceeds the memory guard of a dense representation."""


class RepresentationError(DickeError):
    """A channel cannot act on the representation it was given."""


class ConfigError(DickeError, ValueError):
    """A configuration value is malformed or inconsistent."""
