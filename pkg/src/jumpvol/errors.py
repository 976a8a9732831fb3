"""Exception hierarchy shared across the package."""


class JumpvolError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(JumpvolError, ValueError):
    """A numeric argument is outside its domain (non-positive rate, etc.)."""


class SizeError(JumpvolError, ValueError):
    """Array arguments have inconsistent or insufficient lengths."""


class DataFormatError(JumpvolError, ValueError):
    """An input file could not be parsed into a valid series."""


class NumericalError(JumpvolError, RuntimeError):
    """A sampler produced non-finite values mid-run."""
