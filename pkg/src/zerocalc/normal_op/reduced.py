"""Reduced normal operator on the half-line.

The operator sum a_{j,beta} (t D_t)^j (t eta)^beta is stored in normal form
sum_{l,p} q[l][p] t^p (t D_t)^l, obtained from the commutation
(t D_t) t^p = t^p (t D_t - i p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BadEta, DegenerateLeading, RealCharacteristicRoot, ValidationError
from ..indexset import DEFAULT_TOL
from ..spectrum import DEFAULT_CLUSTER_TOL, BoundarySpectrum, IndicialPoly, ZeroOpSpec, boundary_spectrum

Table = tuple[tuple[complex, ...], ...]


def _zero_table(m: int) -> list[list[complex]]:
    return [[0j] * (m + 1) for _ in range(m + 1)]


def _freeze(q) -> Table:
    return tuple(tuple(complex(v) for v in row) for row in q)


@dataclass(frozen=True)
class ReducedNormalOp:
    """q[l][p] is the coefficient of t^p (t D_t)^l."""

    m: int
    q: Table
    source: ZeroOpSpec | None = None
    y_index: int = 0
    eta_hat: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.q) != self.m + 1 or any(len(r) != self.m + 1 for r in self.q):
            raise ValidationError(f"coefficient table must be {self.m + 1} x {self.m + 1}")
        for l in range(self.m + 1):
            for p in range(self.m + 1):
                if l + p > self.m and self.q[l][p] != 0:
                    raise ValidationError(f"term t^{p} (t D_t)^{l} exceeds order {self.m}")
        if self.q[self.m][0] == 0:
            raise DegenerateLeading("coefficient of (t D_t)^m vanishes")

    @classmethod
    def from_terms(cls, m: int, terms: dict[tuple[int, int], complex]) -> "ReducedNormalOp":
        """Direct construction from ``{(l, p): q}`` for t^p (t D_t)^l."""
        q = _zero_table(m)
        for (l, p), v in terms.items():
            q[l][p] += complex(v)
        return cls(m, _freeze(q))

    def terms(self) -> dict[tuple[int, int], complex]:
        return {(l, p): v for l, row in enumerate(self.q) for p, v in enumerate(row) if v != 0}

    def indicial(self) -> IndicialPoly:
        return IndicialPoly(tuple(self.q[l][0] for l in range(self.m + 1)))

    def exponent_poly(self, p: int) -> np.ndarray:
        """Coefficients in x of J_p(x) = sum_l q[l][p] (-i x)^l, so that L t^x = sum_p J_p(x) t^(x+p)."""
        return np.array([self.q[l][p] * (-1j) ** l for l in range(self.m + 1)], dtype=complex)

    def char_poly(self) -> np.ndarray:
        """Scattering characteristic polynomial chi(xi) = sum_l q[l][m - l] xi^l."""
        return np.array([self.q[l][self.m - l] for l in range(self.m + 1)], dtype=complex)


def build_reduced(op: ZeroOpSpec, y_index: int = 0, eta_hat=None) -> ReducedNormalOp:
    slots = op.n - 1
    if eta_hat is None:
        eta = np.eye(1, slots).ravel()  # first coordinate direction
    else:
        eta = np.asarray(eta_hat, dtype=float).ravel()
    if eta.size != slots:
        raise BadEta(f"eta_hat must have n - 1 = {slots} entries, got {eta.size}")
    if slots and abs(np.linalg.norm(eta) - 1) > 1e-12:
        raise BadEta(f"eta_hat must be a unit vector, |eta_hat| = {np.linalg.norm(eta):.15g}")
    q = _zero_table(op.m)
    for (j, beta), a in op.sample(y_index).items():
        p = sum(beta)
        w = a * (float(np.prod(eta ** np.array(beta))) if slots else 1.0)
        # (t D_t)^j t^p = t^p (t D_t - i p)^j
        for l in range(j + 1):
            q[l][p] += w * math.comb(j, l) * (-1j * p) ** (j - l)
    return ReducedNormalOp(op.m, _freeze(q), op, y_index, tuple(float(v) for v in eta))


def formal_adjoint(opN: ReducedNormalOp) -> ReducedNormalOp:
    """Adjoint with respect to dt/t; t D_t is symmetric for that density."""
    m = opN.m
    q = _zero_table(m)
    for l in range(m + 1):
        for p in range(m + 1):
            c = opN.q[l][p]
            if c == 0:
                continue
            # (t^p (t D_t)^l)^* = (t D_t)^l t^p = t^p (t D_t - i p)^l
            for r in range(l + 1):
                q[r][p] += np.conj(c) * math.comb(l, r) * (-1j * p) ** (l - r)
    return ReducedNormalOp(m, _freeze(q), opN.source, opN.y_index, opN.eta_hat)


def indicial_spectrum(opN: ReducedNormalOp, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> BoundarySpectrum:
    return boundary_spectrum(opN.indicial(), cluster_tol)


@dataclass(frozen=True)
class CharRoot:
    xi: complex
    mult: int
    decaying: bool


def scattering_char_roots(opN: ReducedNormalOp, tol: float = DEFAULT_TOL, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[CharRoot]:
    """Clustered roots of chi; e^{i xi t} decays iff Im xi > 0."""
    chi = opN.char_poly()
    if abs(chi[-1]) == 0:
        raise RealCharacteristicRoot("scattering symbol has degree below m")
    raw = np.roots(chi[::-1])
    out: list[list[complex]] = []
    for r in sorted(raw, key=lambda c: (-c.imag, c.real)):
        for cl in out:
            if abs(r - np.mean(cl)) <= cluster_tol:
                cl.append(r)
                break
        else:
            out.append([r])
    roots = []
    for cl in out:
        xi = complex(np.mean(cl))
        if abs(xi.imag) <= tol:
            raise RealCharacteristicRoot(
                f"characteristic root xi = {xi:.12g} has |Im xi| = {abs(xi.imag):.3g} <= {tol:g}"
            )
        roots.append(CharRoot(xi, len(cl), xi.imag > tol))
    return roots
