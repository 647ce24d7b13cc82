"""Exception types shared across the package."""

from __future__ import annotations


class EtfForgeError(Exception):
    """Base class for all package errors."""


class OrderMismatchError(EtfForgeError, ValueError):
    """Arithmetic between cyclotomic elements of different orders."""


class ConsistencyError(EtfForgeError, AssertionError):
    """An internal verification that theory guarantees has failed."""


class NotAnEtfError(EtfForgeError, ValueError):
    """Input data does not satisfy a required frame property."""


class BudgetExceeded(EtfForgeError):
    """An enumeration would exceed its configured budget.

    ``report`` carries whatever partial information is available, e.g. the
    best spark lower bound established so far or generators found so far.
    """

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = dict(report or {})


class OutOfReach(BudgetExceeded):
    """A requested computation is declared beyond desk scale."""
