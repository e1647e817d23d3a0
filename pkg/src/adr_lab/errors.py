"""Exception hierarchy shared by all modules.

CLI exit codes: ConfigurationError/InputError/UnsupportedNetworkError map to
exit 1, DivergenceError to exit 2, StabilityError to exit 3.
"""


class AdrLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(AdrLabError):
    """Invalid run setup: bad grid counts, lengths, config keys, mismatched domains."""


class InputError(AdrLabError):
    """Invalid runtime input: negative time, non-finite samples, bad cell index."""


class NumericError(AdrLabError):
    """Non-finite intermediate produced during evaluation (overflow, NaN)."""


class DivergenceError(NumericError):
    """A time-stepping run produced non-finite field values.

    Carries the step index at which divergence was first detected.
    """

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class StabilityError(AdrLabError):
    """A step was rejected because the stability constraints fail.

    Carries the offending stability report (Stability2D or Stability3D).
    """

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report


class UnsupportedNetworkError(AdrLabError):
    """The reaction network is outside the class a check is valid for."""
