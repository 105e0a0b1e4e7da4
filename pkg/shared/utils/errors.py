"""Exception hierarchy for Steinberg Lab

Domain preconditions raise subclasses of the matching builtin exception so
callers can catch either the builtin or the lab type.
"""


class SteinbergLabError(Exception):
    """Base class for all lab errors"""


class ConfigError(SteinbergLabError, ValueError):
    """Invalid configuration or command-line parameters"""


class CapExceededError(SteinbergLabError, ValueError):
    """A configured size cap would be exceeded

    Attributes:
        what: Name of the cap (e.g. 'group_order')
        requested: Size that was requested
        cap: Configured limit
    """

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} cap exceeded: requested {requested}, cap {cap}")


class FieldMismatchError(SteinbergLabError, ValueError):
    """Operands live over different fields"""


class InvariantViolation(SteinbergLabError, AssertionError):
    """An asserted mathematical property failed"""


__all__ = [
    "SteinbergLabError",
    "ConfigError",
    "CapExceededError",
    "FieldMismatchError",
    "InvariantViolation",
]
