"""Exception hierarchy shared by every eisenkit module."""


class EisenkitError(Exception):
    """Base class for all eisenkit errors."""


class DomainError(EisenkitError, ValueError):
    """An operation was called outside its mathematical domain."""


class ParseError(EisenkitError, ValueError):
    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class PreconditionError(EisenkitError):
    """An input does not satisfy a documented precondition (e.g. not w-separable)."""


class FieldError(EisenkitError):
    """Zero divisor detected, or an operation needs a certified field."""


class RootFindingError(EisenkitError):
    """Certified root isolation failed at the maximal working precision."""


class UnresolvedError(EisenkitError):
    """Truncated data is insufficient; re-run with more terms."""


class TheoremViolation(EisenkitError):
    """A proved inequality failed. Always indicates a bug."""


class InvariantError(EisenkitError):
    """Internal consistency check failed (e.g. an inexact division)."""
