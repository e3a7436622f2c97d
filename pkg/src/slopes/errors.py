"""Exception types shared across the package."""


class SlopesError(Exception):
    """Base class for all library errors."""


class DomainError(SlopesError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PrecisionError(SlopesError, ValueError):
    """A precision/truncation request is invalid or insufficient.

    ``required`` carries the minimal acceptable value when known.
    """

    def __init__(self, msg, required=None):
        super().__init__(msg)
        self.required = required


class ZeroSeriesError(SlopesError, ValueError):
    """An operation needs a nonzero series (ord, content, division)."""


class NotPositiveDefiniteError(SlopesError, ValueError):
    """A Gram matrix failed its positive-definiteness witness."""


class PrecisionExhaustedError(SlopesError, ArithmeticError):
    """An adaptive computation hit its iteration budget.

    The best estimate obtained so far and its error bound are attached so
    callers can decide whether the partial answer is still usable.
    """

    def __init__(self, msg, estimate=None, error_bound=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error_bound = error_bound


class EnumerationBudgetError(SlopesError, RuntimeError):
    """Lattice enumeration exceeded its node/time budget; result is partial."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class FormulaMismatchError(SlopesError, AssertionError):
    """An exactly-verifiable closed form failed verification."""
