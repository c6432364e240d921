"""Shared exception types, mapped to CLI exit codes in one place."""


class DwlabError(Exception):
    """Base class for all package errors."""


class InputError(DwlabError):
    """Malformed or inconsistent caller input (bad vertex id, id mismatch...)."""


class ParseError(InputError):
    """Unparseable serialized payload; carries a byte/line position when known."""

    def __init__(self, message, offset=None, line=None, column=None):
        super().__init__(message)
        self.offset = offset
        self.line = line
        self.column = column


class RestrictionViolation(InputError):
    """Formula violates the duplicate-variable-per-clause restriction."""


class GenerationError(InputError):
    """A generator's size profile is invalid at some level."""


class BudgetExceeded(DwlabError):
    """Exact search exceeded its configured resource budget (never a wrong answer)."""


class IncompleteStrategyError(DwlabError):
    """A strategy was queried at a position outside its domain."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
