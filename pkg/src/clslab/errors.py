"""Shared exception types and CLI exit-code conventions."""

from __future__ import annotations


class ClslabError(Exception):
    """Base class for all library errors."""


class DimensionError(ClslabError, ValueError):
    """Operands have incompatible shapes."""


class ParseError(ClslabError, ValueError):
    """An instance or solution file does not match its grammar."""


class DegeneracyError(ClslabError):
    """An exact tie that the non-degeneracy assumption rules out.

    ``ties`` names the tied objects (indices or variable names).
    """

    def __init__(self, message: str, ties: tuple = ()):
        super().__init__(message)
        self.ties = tuple(ties)


class BudgetExceededError(ClslabError):
    """An iteration budget ran out; carries the partial trace."""

    def __init__(self, message: str, trace: tuple = ()):
        super().__init__(message)
        self.trace = tuple(trace)


class DomainEscapeError(ClslabError):
    """A map produced a point outside [0,1]^dim."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class PreconditionError(ClslabError):
    """The caller violated an operation contract."""


class InvariantViolationError(ClslabError):
    """An internal consistency check failed; this signals a bug."""


# CLI exit codes; a total function of outcomes.
EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_DEGENERATE = 2
EXIT_INVARIANT = 3
EXIT_USAGE = 4
