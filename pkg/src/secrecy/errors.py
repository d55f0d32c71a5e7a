"""Exception hierarchy shared by every module."""


class SecrecyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SecrecyError, ValueError):
    """An object violates its structural invariants (bad distribution, bad table, ...)."""


class AlphabetMismatchError(ValidationError):
    """Two objects that must share an alphabet do not."""


class UndefinedConditioningError(SecrecyError, ZeroDivisionError):
    """Conditioning on an event of probability zero."""


class EnumerationTooLargeError(SecrecyError):
    """An exhaustive enumeration would exceed its configured cap."""


class NotApplicableError(SecrecyError, ValueError):
    """The operation is not defined for this shape of input (e.g. non-square channel)."""


class NotDoublyStochasticError(ValidationError):
    """A square channel has a row whose sum differs from 1."""

    def __init__(self, row_label: str, row_sum) -> None:
        self.row_label = row_label
        self.row_sum = row_sum
        super().__init__(f"row {row_label!r} sums to {row_sum}, expected 1")


class InvariantViolationError(SecrecyError, AssertionError):
    """A mathematically guaranteed invariant failed; this always indicates a bug."""
