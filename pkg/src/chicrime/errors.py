"""Exception types shared across the package."""


class ChicrimeError(Exception):
    """Base class for all library-specific errors."""


class SchemaError(ChicrimeError):
    """A table or config does not match its declared schema."""


class ParseError(ChicrimeError):
    """A CSV cell could not be parsed in strict mode."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class ArgumentError(ChicrimeError, ValueError):
    """An argument violates an operation precondition."""


class ConvergenceError(ChicrimeError):
    """An iterative solver failed to converge within its budget."""

    def __init__(self, message, trace=None, kkt_violations=None):
        super().__init__(message)
        self.trace = trace
        self.kkt_violations = kkt_violations


class UndefinedMetricError(ChicrimeError):
    """A statistic is undefined for the given input (e.g. constant vector)."""


class DegenerateTableError(ChicrimeError):
    """A contingency table has a zero row or column margin."""


class NotFittedError(ChicrimeError, AttributeError):
    """An estimator was used before calling fit."""
