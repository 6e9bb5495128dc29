"""Exception hierarchy shared by all modules."""


class SrcqError(Exception):
    """Base class for library errors."""


class DomainError(SrcqError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UsageError(SrcqError, ValueError):
    """Inconsistent or ill-posed call, such as a grid mismatch or an oversized shift."""


class ConstraintError(SrcqError, ValueError):
    """A standing hypothesis on the problem data is violated."""


class NumericError(SrcqError, ArithmeticError):
    """A numerical procedure could not reach its accuracy contract."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ProjectionError(SrcqError, RuntimeError):
    """No sign change of the fibering derivative was found."""

    def __init__(self, message, code="no-sign-change"):
        super().__init__(message)
        self.code = code


class StagnationError(SrcqError, RuntimeError):
    """Descent stopped making progress or the iterate escaped the box center."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ContinuationError(SrcqError, RuntimeError):
    """A continuation run violated one of its asserted bounds."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class ConfigError(SrcqError, ValueError):
    """Configuration file problems; carries every issue found."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))
