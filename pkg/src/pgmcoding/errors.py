"""Exception hierarchy.

Every error raised by the library derives from :class:`PGMCodingError`.
Input problems additionally derive from :class:`ValueError` so generic
callers can catch them idiomatically; numerical breakdowns derive from
:class:`ArithmeticError`.
"""

from __future__ import annotations


class PGMCodingError(Exception):
    """Base class for all library errors."""


class ValidationError(PGMCodingError, ValueError):
    """An input violates a documented invariant.

    Attributes:
        path: location of the offending entry (e.g. ``inputs[1].state[0][1]``),
            or ``None`` when the whole object is at fault.
        deviation: measured size of the violation, when one is meaningful.
    """

    def __init__(self, message: str, path: str | None = None,
                 deviation: float | None = None):
        self.path = path
        self.deviation = deviation
        parts = [message]
        if path is not None:
            parts.append(f"at {path}")
        if deviation is not None:
            parts.append(f"(deviation {deviation:.3g})")
        super().__init__(" ".join(parts))


class ParseError(PGMCodingError, ValueError):
    """Model text is not syntactically valid."""


class NumericalFailure(PGMCodingError, ArithmeticError):
    """A numerical routine did not converge or produced non-finite output."""


# operator-core
class NonHermitian(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class EmptyKeepSet(ValidationError):
    pass


class DomainError(ValidationError):
    pass


# quantum-model
class CompletenessViolation(ValidationError):
    pass


# discrimination
class AllZero(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class EpsOutOfRange(ValidationError):
    pass


class SupportFailure(NumericalFailure):
    pass


class SpectrumOutOfRange(ValidationError):
    pass


class ZeroTrace(ValidationError):
    pass


class OrderOutOfRange(ValidationError):
    pass


# divergences
class AlphaOutOfRange(ValidationError):
    pass


class SupportViolation(ValidationError):
    pass


class POutOfRange(ValidationError):
    pass


# coding-bounds
class BadM(ValidationError):
    pass


class GridEmpty(ValidationError):
    pass


class DeltaOutOfRange(ValidationError):
    pass


class NonProductPrior(ValidationError):
    pass


class PartialPrecoder(ValidationError):
    pass


class MarginalConstraintViolated(ValidationError):
    pass


# coding-simulator
class EnumerationTooLarge(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass
