"""Exception types shared across the package."""


class RetimeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(RetimeError):
    """Malformed values, shapes, or files."""


class InvalidTargetError(RetimeError):
    """Requested output length is infeasible for the source length."""


class DegenerateSignalError(RetimeError):
    """Signal permits no speed-up anywhere, so no duration reduction exists."""
