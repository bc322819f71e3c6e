"""Exception types raised across the package."""


class NIError(Exception):
    """Base class for all package errors."""


class DomainError(NIError, ValueError):
    """An argument lies outside the domain of the operation (e.g. NaN angle)."""


class UsageError(NIError, ValueError):
    pass


class ValidationError(NIError, ValueError):
    pass


class UnsupportedOperationError(NIError, TypeError):
    pass


class RangeError(NIError, ValueError):
    """Query outside a tabulated grid."""


class ParseError(NIError, ValueError):
    def __init__(self, reason, line=None):
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")


class IngestionError(NIError, ValueError):
    def __init__(self, reason, row=None):
        self.reason = reason
        self.row = row
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}{reason}")


class ComparisonError(NIError, ValueError):
    pass


class ConvergenceError(NIError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    ``diagnostics`` holds per-panel information (interval, error estimate,
    number of subdivisions) so callers can see where refinement stalled.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UndefinedContrastError(NIError, ValueError):
    """Contrast requested for a curve with I_max + I_min = 0."""
