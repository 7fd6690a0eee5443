"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SymCodesError(Exception):
    """Base class for all errors raised by symcodes."""


class ValidationError(SymCodesError, ValueError):
    """Bad user-supplied parameter; the CLI maps this to exit status 2."""


class NonPrimeP(ValidationError):
    pass


class EvenCharacteristic(ValidationError):
    pass


class ReducibleModulus(ValidationError):
    pass


class BadCharacteristic(ValidationError):
    pass


class DivisionByZero(SymCodesError, ZeroDivisionError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class MTooLarge(ValidationError):
    pass


class NonMonic(ValidationError):
    pass


class ZeroLine(ValidationError):
    pass


class ZeroConic(ValidationError):
    pass


class SIsSquare(ValidationError):
    pass


class NotInLambda(ValidationError):
    pass


class DegenerateTriangle(ValidationError):
    pass


class EmptyPointSet(ValidationError):
    pass


class TooLarge(SymCodesError):
    """An exhaustive enumeration would exceed the configured work guard.

    ``work`` carries the estimated number of elementary steps.
    """

    def __init__(self, message: str, work: int | None = None):
        super().__init__(message)
        self.work = work
