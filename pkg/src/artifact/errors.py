"""Exception types shared across the package."""

from __future__ import annotations


class GraphError(Exception):
    """Base class for every error raised by this package."""


class AlphabetMismatch(GraphError):
    pass


class InvalidMatch(GraphError):
    pass


class DanglingViolation(GraphError):
    pass


class NotFastRule(GraphError):
    pass


class HostMismatch(GraphError):
    pass


class AlphabetClash(GraphError):
    pass


class NotInImage(GraphError):
    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class BadSize(GraphError):
    pass


class InvalidRule(GraphError):
    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class ParseError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class StepBudgetExceeded(GraphError):
    """Raised when a reduction hits its step budget; keeps the partial trace."""

    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = trace
