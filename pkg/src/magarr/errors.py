"""Structured errors shared across the package."""


class MagarrError(Exception):
    """Base class for all package errors."""


class ParseError(MagarrError):
    """Invalid arrangement input."""


class BudgetExceededError(MagarrError):
    """A computation exceeded its configured size budget."""

    def __init__(self, stage, limit, observed):
        self.stage = stage
        self.limit = limit
        self.observed = observed
        super().__init__(f"{stage}: budget {limit} exceeded (observed {observed})")


class CheckFailedError(MagarrError):
    """An internal cross-check that must hold by construction failed."""
