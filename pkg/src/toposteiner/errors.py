"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class SteinerError(Exception):
    """Base class for all errors raised by toposteiner."""


class InstanceError(SteinerError, ValueError):
    """Structurally invalid instance (not a tree, unknown ids, odd coordinates...)."""


class InfeasibleError(SteinerError):
    """No embedding satisfies the length restrictions."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class LocalOrderError(SteinerError):
    """A requested component move would flip the coordinate order of some edge."""


class ParseError(SteinerError, ValueError):
    """Malformed instance or solution document.

    ``where`` is a human readable location: ``line 3, column 7`` for syntax
    errors or a field path such as ``edges[4]`` for structural ones.
    """

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class BudgetExceeded(SteinerError):
    """The exhaustive oracle would exceed its configured work budget."""
