"""
Exception hierarchy shared by the algebra, reduction and CLI layers.

Every exception carries the process exit code the CLI reports for it.
"""

from typing import Optional


class SkewPairError(Exception):
    """Base class for all skewpair errors."""

    exit_code = 1


class FieldError(SkewPairError):
    """Invalid modulus, mixed fields or division by zero."""


class ShapeError(SkewPairError):
    """Matrix dimensions do not agree."""


class NotSkewError(SkewPairError):
    """A matrix that must be skew-symmetric is not."""


class SingularMatrixError(SkewPairError):
    """Inverse requested for a singular matrix."""


class SingularPairError(SkewPairError):
    """A pair that must have both matrices nonsingular does not (or vice versa)."""


class FactorizationLimitError(SkewPairError):
    """Polynomial factorization exceeded its configured bounds."""


class ReductionError(SkewPairError):
    """An internal invariant of the reduction was violated."""

    def __init__(self, message: str, step: Optional[str] = None):
        self.step = step
        super().__init__(f"[{step}] {message}" if step else message)


class InstanceFormatError(SkewPairError):
    """Input file could not be parsed."""

    exit_code = 2


class WitnessMismatchError(SkewPairError):
    """A witness does not reproduce the claimed canonical form."""

    exit_code = 3


class OracleMismatchError(SkewPairError):
    """Canonical blocks disagree with the independent pencil invariants."""

    exit_code = 4
