"""Exception types shared across the package."""


class PulseLoadError(Exception):
    """Base class for all package errors."""


class DataError(PulseLoadError, ValueError):
    """Input data is malformed or cannot support the requested estimate."""


class NumericalError(PulseLoadError, ArithmeticError):
    """A fit or simulation produced a result outside its valid domain."""
