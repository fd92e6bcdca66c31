"""Exception types shared across the toolkit."""


class InvalidInput(ValueError):
    """Input violates a documented precondition (shape, finiteness, ranges)."""


class NumericalFailure(RuntimeError):
    """An underlying numerical routine (eigensolver, QR) did not converge."""


class IllConditioned(RuntimeError):
    """A computation is too ill-conditioned to trust.

    Carries the offending residual or condition number in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParseError(ValueError):
    """A matrix file could not be parsed; ``line`` is the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UsageError(ValueError):
    """Bad command-line usage (unknown command, missing argument)."""
