"""Exception types shared across the package."""


class DiffmatError(Exception):
    """Base class for all package errors."""


class DomainError(DiffmatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BudgetError(DiffmatError):
    """A computation would exceed its configured resource budget."""


class IntegrityError(DiffmatError):
    """A floating-point result failed its exactness guard."""
