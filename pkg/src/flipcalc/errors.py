"""Shared exception types.

Exit-code mapping used by the CLI: DomainError -> 1, BudgetExceeded -> 2,
FormatError -> 3.
"""


class FlipcalcError(Exception):
    pass


class DomainError(FlipcalcError):
    """Invalid input for an operation (bad ids, mismatched partitions, illegal moves...)."""


class BudgetExceeded(FlipcalcError):
    """An enumeration or recursion would exceed its configured budget."""

    def __init__(self, message: str, *, required: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class FormatError(FlipcalcError):
    """Malformed input file or serialized payload."""
