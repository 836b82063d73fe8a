"""Index-set bookkeeping and normal-operator checks for uniformly degenerate operators."""

from .errors import ZeroCalcError
from .indexset import (
    EMPTY,
    N0,
    ComplexExponent,
    IndexPoint,
    TruncatedIndexSet,
    closure_members,
    extended_union,
    from_half_spectrum,
    generate_ff,
    generate_flat,
    generate_hat,
    generate_sharp,
    min_re,
    shift,
    shift_int,
    sum_,
    union,
)

__version__ = "0.1.0"
