"""Exception types shared across the package."""


class FrechetError(Exception):
    """Base class for errors raised by this package."""


class UsageError(FrechetError, ValueError):
    """Invalid arguments or malformed input objects."""


class ContractError(FrechetError, RuntimeError):
    """An internal precondition of the search pipeline did not hold."""


class ParseError(UsageError):
    """A curve file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
