"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class DiffraktError(Exception):
    exit_code = 1


class ValidationError(DiffraktError, ValueError):
    """Malformed or inconsistent input."""

    exit_code = 2


class NumericalContractError(DiffraktError, ArithmeticError):
    """An internal identity check exceeded its tolerance."""

    exit_code = 3


class ResourceCapError(DiffraktError):
    """A group order or enumeration bound was exceeded."""

    exit_code = 4
