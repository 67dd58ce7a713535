"""Exception types shared across the package."""


class PPCompError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PPCompError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ValidationError(PPCompError):
    """Input violates a structural invariant (arity, sorts, unknown symbol...)."""


class BudgetExceededError(PPCompError):
    """A brute-force sweep would exceed the configured budget."""
