"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SctError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(SctError, ValueError):
    """An instance or ranking document is malformed or inconsistent."""


class ParseError(InstanceError):
    """Syntax error in an instance or ranking document.

    ``line`` and ``column`` are 1-based; either may be ``None`` when the
    error is not attached to a position (e.g. premature end of input).
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ClassificationError(SctError):
    """The instance is outside the class an algorithm requires."""


class NonTerminatingError(SctError):
    """The instance does not satisfy SCT; ``verdict`` carries the witness."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class BudgetExceeded(SctError):
    """A resource budget (closure size, enumeration cap) was exhausted."""


class UndefinedSuccessor(SctError):
    """A reachable rank vector has no successor under some graph."""


class IllFormedRanking(SctError, ValueError):
    """Ranking values of mismatched entry kinds were compared."""


class GenerationError(SctError):
    """Random instance generation failed (bad parameters, retries exhausted)."""
