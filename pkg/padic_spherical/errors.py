"""
Error Hierarchy
Alle Fehler der Bibliothek erben von PadicError.
"""

from typing import Optional


class PadicError(Exception):
    """Base class for all library errors."""


class DomainError(PadicError, ValueError):
    """A mathematical precondition is violated (p = 2, p | n, |z|_p >= 1, ...)."""


class PrecisionError(PadicError, ArithmeticError):
    """A result would be known to fewer than one p-adic digit."""


class PadicZeroDivisionError(PadicError, ZeroDivisionError):
    """Division by an exact or precision-limited zero."""


class PreconditionError(PadicError, ValueError):
    """The caller broke an operation contract (budget, coverage, r(x) != r(x'))."""


class InternalConsistencyError(PadicError, AssertionError):
    """Two independent computations disagree. Never expected to fire."""


class PoleError(PadicError):
    """
    Pairing evaluated at the exceptional quasicharacter.

    Args:
        message: Human readable description
        residue: ResidueReport of the pole (see distributions.residue_at_exceptional)
    """

    def __init__(self, message: str, residue: Optional[object] = None):
        super().__init__(message)
        self.residue = residue
