"""Exception types shared by every module."""


class HypwpError(Exception):
    """Base class for all library errors."""


class DomainError(HypwpError, ValueError):
    """An input lies outside the domain where a quantity is defined."""


class NumericalError(HypwpError, ArithmeticError):
    """A numerical routine failed to reach its requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SpecError(HypwpError, ValueError):
    """A problem description is malformed.

    ``path`` names the offending field (dotted, with list indices) and
    ``line`` the source line when known.
    """

    def __init__(self, message, path=None, line=None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(self.format())

    def format(self) -> str:
        where = []
        if self.path:
            where.append(f"field {self.path}")
        if self.line is not None:
            where.append(f"line {self.line}")
        return f"{self.message} ({', '.join(where)})" if where else self.message
