"""Finite-difference action of a reduced normal operator on a log grid."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from ..errors import GridTooCoarse, ValidationError
from .reduced import ReducedNormalOp

HALF_WIDTH = 4


@dataclass(frozen=True)
class LogGrid:
    """Points t = exp(s) with s uniform on [s_min, s_max]."""

    s_min: float
    s_max: float
    size: int

    def __post_init__(self):
        if not self.s_max > self.s_min:
            raise ValidationError("log grid needs s_max > s_min")

    @classmethod
    def from_t(cls, t_min: float, t_max: float, size: int) -> "LogGrid":
        return cls(float(np.log(t_min)), float(np.log(t_max)), size)

    @property
    def s(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.size)

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.s)

    @property
    def h(self) -> float:
        return (self.s_max - self.s_min) / (self.size - 1)


def fornberg_weights(x0: float, x: np.ndarray, order: int) -> np.ndarray:
    """Weights c[d, i] with f^(d)(x0) ~ sum_i c[d, i] f(x[i]), d = 0..order."""
    n = len(x)
    c = np.zeros((order + 1, n))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@lru_cache(maxsize=64)
def derivative_matrices(size: int, h: float, order: int) -> tuple:
    """Sparse matrices for d/ds^k, k = 0..order, on a uniform grid."""
    width = 2 * (HALF_WIDTH + (order + 1) // 2) + 1
    if size < width:
        raise GridTooCoarse(f"grid of {size} points is smaller than the stencil width {width}")
    half = width // 2
    rows, cols = [], []
    vals = [[] for _ in range(order + 1)]
    offsets = np.arange(width)
    for i in range(size):
        start = min(max(i - half, 0), size - width)
        w = fornberg_weights(float(i - start), offsets.astype(float), order)
        for k in range(order + 1):
            vals[k].extend(w[k] / h**k)
        rows.extend([i] * width)
        cols.extend(range(start, start + width))
    return tuple(sps.csr_matrix((vals[k], (rows, cols)), shape=(size, size)) for k in range(order + 1))


def apply(opN: ReducedNormalOp, u: np.ndarray, grid: LogGrid) -> np.ndarray:
    """Samples of sum q[l][p] t^p (t D_t)^l u, with t D_t = -i d/ds."""
    u = np.asarray(u)
    if u.shape != (grid.size,):
        raise ValidationError(f"expected {grid.size} samples, got shape {u.shape}")
    D = derivative_matrices(grid.size, grid.h, opN.m)
    t = grid.t
    out = np.zeros(grid.size, dtype=complex)
    derivs = [D[l] @ u for l in range(opN.m + 1)]
    for (l, p), c in opN.terms().items():
        out += c * (-1j) ** l * t**p * derivs[l]
    return out
