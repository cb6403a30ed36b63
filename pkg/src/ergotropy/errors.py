"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class ErgotropyError(Exception):
    """Base class for library errors."""


class ValidationError(ErgotropyError, ValueError):
    """Malformed input: wrong shape, non-Hermitian matrix, bad weights."""


class DomainError(ErgotropyError, ValueError):
    """Well-formed input outside the domain where a quantity is defined."""


class NumericalError(ErgotropyError, ArithmeticError):
    """A numerical routine failed to converge."""
