"""Solution bases at both ends of the half-line and the matching test.

Near t = 0 solutions behave like t^z (log t)^k for indicial roots z; near
t = infinity like e^{i xi t} for roots xi of the characteristic polynomial.
Both families are integrated to t = 1 in the variable s = log t and
compared there: a kernel element is a combination of admissible 0-side
columns that equals a combination of decaying infinity-side columns.

Columns are propagated in chunks and re-orthonormalized after each chunk.
The 0-side columns are ordered by decreasing Re z, so the admissible ones
(Re z > alpha) always form a prefix and the span of every prefix survives
the orthonormalization.  One integration therefore serves every weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import subspace_angles
from scipy.special import binom

from ..errors import IntegratorFailure, RankAmbiguity, ResonanceWarning, ValidationError, WeightOnSpectrum
from ..indexset import DEFAULT_TOL
from ..spectrum import DEFAULT_CLUSTER_TOL
from .reduced import ReducedNormalOp, indicial_spectrum, scattering_char_roots

DEFAULT_T0 = 1e-4
DEFAULT_T_MAX = 20.0
DEFAULT_RTOL = 1e-10
DEFAULT_EPS_RANK = 1e-8
RESONANCE_TOL = 1e-6
CONVERGENCE_TOL = 1e-6
CHUNK = 0.5
MAX_SERIES_TERMS = 400


@dataclass(frozen=True)
class ZeroColumn:
    z: complex
    log_power: int
    resonant: bool


@dataclass(frozen=True)
class InfinityColumn:
    xi: complex
    power: int


@dataclass
class SolutionBasis:
    """Columns (u, u', ..., u^(m-1)) at t = 1, derivatives in s = log t."""

    at_zero: list[ZeroColumn]
    zero_values: np.ndarray
    at_infinity: list[InfinityColumn]
    infinity_values: np.ndarray
    t0: float
    t_max: float
    rtol: float
    flags: list[str] = field(default_factory=list)


# ------------------------------------------------------------------ integration


def _system(opN: ReducedNormalOp):
    m = opN.m
    lead = opN.q[m][0] * (-1j) ** m
    P = np.arange(m + 1)
    Qc = np.array([[opN.q[l][p] * (-1j) ** l / lead for p in range(m + 1)] for l in range(m)], dtype=complex)

    def rhs(s, y):
        Y = y.reshape(m, -1)
        coeff = Qc @ np.exp(P * s)
        dY = np.empty_like(Y)
        dY[:-1] = Y[1:]
        dY[-1] = -coeff @ Y
        return dY.ravel()

    return rhs


def _propagate(opN: ReducedNormalOp, Y: np.ndarray, s_from: float, s_to: float, rtol: float) -> np.ndarray:
    """Carry the columns of Y from s_from to s_to, orthonormalizing between chunks."""
    rhs = _system(opN)
    m, r = Y.shape
    if r == 0:
        return Y
    Y, _ = np.linalg.qr(Y)
    n_chunks = max(1, math.ceil(abs(s_to - s_from) / CHUNK))
    edges = np.linspace(s_from, s_to, n_chunks + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs, (a, b), Y.ravel(), method="DOP853", rtol=rtol, atol=rtol * 1e-3)
        if not sol.success:
            raise IntegratorFailure(f"integration on s in [{a:.3g}, {b:.3g}] failed: {sol.message}")
        Y = sol.y[:, -1].reshape(m, r)
        if not np.all(np.isfinite(Y)):
            raise IntegratorFailure(f"non-finite solution values near s = {b:.3g}")
        Y, _ = np.linalg.qr(Y)
    return Y


# ------------------------------------------------------------------ 0-side


def _ser_mul(a, b, n):
    return np.convolve(a, b)[:n]


def _ser_inv(a, n):
    out = np.zeros(n, dtype=complex)
    out[0] = 1 / a[0]
    for k in range(1, n):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1][:k]) / a[0]
    return out


def _shifted(coeffs: np.ndarray, x0: complex, n: int) -> np.ndarray:
    """Coefficients of P(x0 + eps) up to eps^(n-1)."""
    P = np.polynomial.Polynomial(coeffs)
    out = np.zeros(n, dtype=complex)
    fact = 1.0
    for r in range(n):
        out[r] = P(x0) / fact
        P = P.deriv()
        fact *= r + 1
    return out


def frobenius_data(opN: ReducedNormalOp, z0: complex, mult: int, s0: float, roots: list[complex]):
    """Initial data at s0 for the mult solutions t^z0 (log t)^k, k < mult.

    Series sum_N c_N(eps) t^(z0 + eps + N) with c_0 = 1 solve the equation
    up to J_0(z0 + eps) t^(z0 + eps); the eps^k Taylor coefficients are the
    solutions.  Arithmetic is in power series truncated at eps^(mult-1).
    Returns the m x mult matrix of s-derivatives and a resonance flag.
    """
    m, n = opN.m, mult
    J = [opN.exponent_poly(p) for p in range(m + 1)]
    active = [p for p in range(1, m + 1) if np.any(J[p] != 0)]
    # a root at z0 + K for a positive integer K blocks the recursion at N = K
    blocked = [
        round((r - z0).real) for r in roots
        if abs(r - z0 - round((r - z0).real)) <= RESONANCE_TOL and round((r - z0).real) >= 1
    ]
    n_max = min(blocked) - 1 if blocked else MAX_SERIES_TERMS
    resonant = bool(blocked) and bool(active)
    t0 = math.exp(s0)
    cs = [np.eye(1, n, 0, dtype=complex).ravel()]
    for N in range(1, n_max + 1):
        if not active:
            break
        acc = np.zeros(n, dtype=complex)
        for p in active:
            if p <= N:
                acc += _ser_mul(_shifted(J[p], z0 + N - p, n), cs[N - p], n)
        cN = -_ser_mul(acc, _ser_inv(_shifted(J[0], z0 + N, n), n), n)
        cs.append(cN)
        scale = max(np.abs(c).max() * t0**k for k, c in enumerate(cs))
        if N > m and all(np.abs(cs[-i]).max() * t0 ** (N - i + 1) <= 1e-18 * scale for i in range(1, min(m, N) + 1)):
            break
    # e^{eps s0} and (z0 + N + eps)^d as series
    exp_eps = np.array([s0**b / math.factorial(b) for b in range(n)], dtype=complex)
    out = np.zeros((m, n), dtype=complex)
    for N, c in enumerate(cs):
        x = z0 + N
        base = np.exp(x * s0)
        for d in range(m):
            pw = np.array([binom(d, r) * x ** (d - r) if r <= d else 0 for r in range(n)], dtype=complex)
            out[d] += base * _ser_mul(_ser_mul(c, pw, n), exp_eps, n)
    return out, resonant


def _zero_columns(opN: ReducedNormalOp, cluster_tol: float) -> list[tuple[complex, int]]:
    spec = indicial_spectrum(opN, cluster_tol)
    roots = [(complex(z), m) for z, m in spec.roots]
    roots.sort(key=lambda r: (-r[0].real, -r[0].imag))
    return roots


@lru_cache(maxsize=256)
def _zero_side(opN: ReducedNormalOp, t0: float, rtol: float, cluster_tol: float):
    roots = _zero_columns(opN, cluster_tol)
    all_roots = [z for z, _ in roots]
    s0 = math.log(t0)
    cols, blocks = [], []
    for z, mult in roots:
        data, resonant = frobenius_data(opN, z, mult, s0, all_roots)
        norms = np.linalg.norm(data, axis=0)
        blocks.append(data / np.where(norms > 0, norms, 1))
        cols.extend(ZeroColumn(z, k, resonant) for k in range(mult))
    Y = np.hstack(blocks) if blocks else np.zeros((opN.m, 0), dtype=complex)
    # propagate prefixes independently of the trailing columns
    Y1 = _propagate(opN, Y, s0, 0.0, rtol)
    return tuple(cols), Y1


def _infinity_data(opN: ReducedNormalOp, xi: complex, power: int, t_max: float) -> np.ndarray:
    """s-derivatives of t^power e^{i xi t} at t_max, up to a common factor."""
    m = opN.m
    # t-derivatives of t^power e^{i xi t} divided by e^{i xi t}
    tder = []
    for k in range(m):
        v = sum(
            binom(k, a) * (math.perm(power, a) * t_max ** (power - a) if a <= power else 0) * (1j * xi) ** (k - a)
            for a in range(k + 1)
        )
        tder.append(v)
    # (t d/dt)^d = sum_k S(d, k) t^k d^k/dt^k
    out = np.zeros(m, dtype=complex)
    for d in range(m):
        out[d] = sum(_stirling2(d, k) * t_max**k * tder[k] for k in range(d + 1))
    return out


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@lru_cache(maxsize=256)
def _infinity_side(opN: ReducedNormalOp, t_max: float, rtol: float, tol: float, cluster_tol: float):
    roots = [r for r in scattering_char_roots(opN, tol, cluster_tol) if r.decaying]
    cols, data = [], []
    for r in roots:
        for q in range(r.mult):
            v = _infinity_data(opN, r.xi, q, t_max)
            data.append(v / np.linalg.norm(v))
            cols.append(InfinityColumn(r.xi, q))
    Y = np.array(data, dtype=complex).T if data else np.zeros((opN.m, 0), dtype=complex)
    return tuple(cols), _propagate(opN, Y, math.log(t_max), 0.0, rtol)


def _admissible_count(cols, alpha, tol) -> int:
    for c in cols:
        if abs(c.z.real - alpha) <= tol:
            raise WeightOnSpectrum(
                f"weight alpha = {alpha:.12g} lies on the indicial root z = {c.z:.12g} (tolerance {tol:g})"
            )
    return sum(1 for c in cols if c.z.real > alpha + tol)


def _subspace_gap(A: np.ndarray, B: np.ndarray) -> float:
    if A.shape[1] == 0 and B.shape[1] == 0:
        return 0.0
    if A.shape[1] != B.shape[1]:
        return math.inf
    return float(np.sin(np.max(subspace_angles(A, B))))


def frobenius_basis(
    opN: ReducedNormalOp,
    alpha: float,
    t0: float = DEFAULT_T0,
    rtol: float = DEFAULT_RTOL,
    tol: float = DEFAULT_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    check: bool = True,
) -> SolutionBasis:
    """Columns at t = 1 of solutions behaving like t^z (log t)^k, Re z > alpha."""
    if not 0 < t0 <= 0.1:
        raise ValidationError(f"t0 must lie in (0, 0.1], got {t0}")
    cols, Y = _zero_side(opN, float(t0), rtol, cluster_tol)
    r = _admissible_count(cols, alpha, tol)
    flags = []
    if any(c.resonant for c in cols[:r]):
        warnings.warn(
            "indicial roots differ by a nonzero integer; Frobenius series truncated below the resonance",
            ResonanceWarning,
            stacklevel=2,
        )
        flags.append("resonance")
    if check and r:
        _, Y4 = _zero_side(opN, float(t0) / 4, rtol, cluster_tol)
        gap = _subspace_gap(Y[:, :r], Y4[:, :r])
        if gap > CONVERGENCE_TOL:
            flags.append(f"frobenius-unconverged({gap:.2g})")
    return SolutionBasis(list(cols[:r]), Y[:, :r], [], np.zeros((opN.m, 0)), t0, math.nan, rtol, flags)


def scattering_basis(
    opN: ReducedNormalOp,
    t_max: float = DEFAULT_T_MAX,
    rtol: float = DEFAULT_RTOL,
    tol: float = DEFAULT_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    check: bool = True,
) -> SolutionBasis:
    """Columns at t = 1 of the solutions decaying exponentially as t -> infinity."""
    if not t_max > 1:
        raise ValidationError(f"t_max must exceed 1, got {t_max}")
    cols, Y = _infinity_side(opN, float(t_max), rtol, tol, cluster_tol)
    flags = []
    if check and cols:
        _, Y2 = _infinity_side(opN, 2 * float(t_max), rtol, tol, cluster_tol)
        gap = _subspace_gap(Y, Y2)
        if gap > CONVERGENCE_TOL:
            flags.append(f"scattering-unconverged({gap:.2g})")
    return SolutionBasis([], np.zeros((opN.m, 0)), list(cols), Y, math.nan, t_max, rtol, flags)


# ------------------------------------------------------------------ kernel test


@dataclass
class KernelResult:
    dim: int
    singular_values: list[float]
    r_zero: int
    d_infinity: int
    flags: list[str]


def numerical_rank(M: np.ndarray, eps_rank: float) -> tuple[int, np.ndarray]:
    if M.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0, sv
    rel = sv / sv[0]
    amb = rel[(rel > eps_rank / 10) & (rel < eps_rank * 10)]
    if amb.size:
        raise RankAmbiguity(
            f"relative singular value {amb[0]:.3g} lies in the ambiguity band "
            f"({eps_rank / 10:g}, {eps_rank * 10:g}) around the rank threshold {eps_rank:g}"
        )
    return int(np.sum(rel > eps_rank)), sv


def kernel_dimension(
    opN: ReducedNormalOp,
    alpha: float,
    t0: float = DEFAULT_T0,
    t_max: float = DEFAULT_T_MAX,
    eps_rank: float = DEFAULT_EPS_RANK,
    rtol: float = DEFAULT_RTOL,
    tol: float = DEFAULT_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    check: bool = True,
) -> KernelResult:
    """Dimension of the solutions in t^alpha L^2(dt/t) by rank deficiency at t = 1."""
    zb = frobenius_basis(opN, alpha, t0, rtol, tol, cluster_tol, check)
    ib = scattering_basis(opN, t_max, rtol, tol, cluster_tol, check)
    M = np.hstack([zb.zero_values, ib.infinity_values])
    rank, sv = numerical_rank(M, eps_rank)
    r, d = M.shape[1] - ib.infinity_values.shape[1], ib.infinity_values.shape[1]
    return KernelResult(r + d - rank, [float(v) for v in sv], r, d, zb.flags + ib.flags)
