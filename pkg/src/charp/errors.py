"""Exception hierarchy shared by every module."""


class CharPError(Exception):
    """Base class for all library errors."""


class ContextError(CharPError, ValueError):
    """Invalid arithmetic context (non-prime modulus, mismatched rings)."""


class LevelMismatch(CharPError, ValueError):
    pass


class DimensionMismatch(CharPError, ValueError):
    pass


class PreconditionError(CharPError, ValueError):
    """An operation was called outside its documented domain."""


class NotIntegrableError(PreconditionError):
    pass


class NonClosedFormError(PreconditionError):
    pass


class InfeasibleError(CharPError):
    """A finite linear system has no solution at the requested degree bound."""


class FlatSectionError(CharPError):
    """Fewer than rank-many independent flat sections were found."""

    def __init__(self, message, found=0, rank=0):
        super().__init__(message)
        self.found = found
        self.rank = rank


class NonLinearPCurvature(CharPError):
    """The p-th power of a covariant derivative kept terms of order in (0, p)."""


class ParseError(CharPError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column
