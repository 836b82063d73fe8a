"""Reduced normal operator: construction, action, solution bases and invertibility."""

from .bases import (
    SolutionBasis,
    frobenius_basis,
    frobenius_data,
    kernel_dimension,
    scattering_basis,
)
from .grid import LogGrid, apply
from .indicial import Expansion, apply_indicial, indicial_solve
from .reduced import (
    ReducedNormalOp,
    build_reduced,
    formal_adjoint,
    indicial_spectrum,
    scattering_char_roots,
)
from .verdict import (
    InvertibilityVerdict,
    SweepRecord,
    bessel_oracle,
    fully_elliptic,
    invertibility,
    sweep_invertibility,
)
