"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class StabError(Exception):
    """Base class for all library errors."""


class UsageError(StabError, TypeError):
    """An argument has the wrong kind (e.g. irrational point in exact mode)."""


class DomainError(StabError, ValueError):
    """A real argument lies outside the admissible domain.

    Attributes
    ----------
    value : the offending argument
    endpoint : nearest admissible endpoint, when one exists
    """

    def __init__(self, message: str, value=None, endpoint=None):
        super().__init__(message)
        self.value = value
        self.endpoint = endpoint


class InvalidBaseError(DomainError):
    """Q(eps) <= 1, so log Q is not positive on the region."""


class NotDefinedError(DomainError):
    """The implicit curve r(s) is not defined at the requested s."""


class ParseError(StabError, ValueError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class PreconditionError(StabError, ValueError):
    pass


class TailNotCertifiedError(StabError):
    """The analytic tail bound cannot certify t -> infinity for this exponent."""


class ThresholdDoesNotExistError(StabError):
    """r(s) is unbounded, so no real threshold exists."""


class ReductionInvalidError(StabError):
    def __init__(self, message: str, failing: str):
        super().__init__(message)
        self.failing = failing


class MixedHodgeUnavailableError(StabError):
    """No closed-form mixed Hodge polynomial is known for this space."""


class FHInputError(StabError, ValueError):
    pass
