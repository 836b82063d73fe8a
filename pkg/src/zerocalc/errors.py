"""Exception hierarchy.

Every error raised by the package derives from :class:`ZeroCalcError` and
belongs to exactly one family; the family fixes the CLI exit code.
"""

from __future__ import annotations


class ZeroCalcError(Exception):
    exit_code = 1


class ValidationError(ZeroCalcError):
    """Malformed input or violated precondition (exit 2)."""

    exit_code = 2


class AmbiguityError(ZeroCalcError):
    """A quantity fell inside a tolerance ambiguity band (exit 3)."""

    exit_code = 3


class EllipticityError(ZeroCalcError):
    """Operator is not fully elliptic, or the weight sits on the spectrum (exit 4)."""

    exit_code = 4


class NumericalError(ZeroCalcError):
    """Numerical procedure failed (exit 5)."""

    exit_code = 5


# validation
class SpecFormatError(ValidationError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CutoffExceeded(ValidationError):
    pass


class DegenerateLeading(ValidationError):
    pass


class BadEta(ValidationError):
    pass


class GridTooCoarse(ValidationError):
    pass


class InvalidWindow(ValidationError):
    pass


class IntegrabilityViolation(ValidationError):
    pass


class ExpressionSyntaxError(ValidationError):
    pass


class OracleInapplicable(ValidationError):
    pass


# ambiguity bands
class AmbiguousCoincidence(AmbiguityError):
    pass


class AmbiguousTolerance(AmbiguityError):
    pass


class ClusterAmbiguity(AmbiguityError):
    pass


class RankAmbiguity(AmbiguityError):
    pass


# ellipticity / weight
class WeightOnSpectrum(EllipticityError):
    pass


class RealCharacteristicRoot(EllipticityError):
    pass


class NonConstantSpectrum(EllipticityError):
    pass


# numerics
class IntegratorFailure(NumericalError):
    pass


class ResonanceWarning(UserWarning):
    """Indicial roots differ by a nonzero integer; Frobenius data truncated."""


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ZeroCalcError):
        return exc.exit_code
    return 1
