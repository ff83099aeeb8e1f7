"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes (2, 3, 4).
"""


class BBSpacesError(Exception):
    exit_code = 1


class ValidationError(BBSpacesError, ValueError):
    """Bad input: domain violations, misaligned grids, malformed descriptors."""

    exit_code = 2


class AlignmentError(ValidationError):
    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class ConvergenceError(BBSpacesError, ArithmeticError):
    """An iterative solver did not reach its tolerance."""

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotAFrameError(ConvergenceError):
    """Numerical evidence that the truncated Gabor system is not a frame."""


class ResourceCapError(BBSpacesError, RuntimeError):
    exit_code = 4


class PrefixExhaustedError(ResourceCapError):
    """A finite explicit sequence ran out of terms before the request was answered."""
