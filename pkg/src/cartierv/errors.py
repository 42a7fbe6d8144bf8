"""Exception types shared across the package."""

from __future__ import annotations


class CartierError(Exception):
    """Base class for all domain errors."""


class RingMismatchError(CartierError):
    """Operands live over different rings."""


class RankMismatchError(CartierError):
    """Vector or matrix rank does not match the ambient free module."""


class NotPrimeError(CartierError):
    """Characteristic is not a prime in the supported range."""


class LevelCapExceededError(CartierError):
    """A Frobenius level e above the configured cap was requested."""


class StabilizationCapExceededError(CartierError):
    """A chain did not stabilize within the level cap.

    Carries the partial, uncertified result when one is available.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class NonDegenerateError(CartierError):
    """The chosen element is a zero divisor on the module, so positive
    filtration levels are undefined."""


class NotFRegularError(CartierError):
    """V-filtration machinery was asked to run on a non-F-regular input."""


class FptDivergenceError(CartierError):
    """The two F-pure-threshold methods disagree."""


class ParseError(CartierError):
    """Polynomial or fraction syntax error, 1-based column attached."""

    def __init__(self, message: str, column: int | None = None):
        if column is not None:
            message = f"{message} at column {column}"
        super().__init__(message)
        self.column = column
