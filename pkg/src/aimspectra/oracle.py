"""Finite-difference eigenvalue oracle for cross-checking AIM.

The radial equation is discretized for ``phi = u / r^((k-1)/2)``, which is
regular at the origin, in its symmetric weighted form

    -1/2 r^(1-k) (r^(k-1) phi')' + (-a/r + b r^2) phi = E phi

on nodes ``r_i = i h`` (i = 0..m) with ``phi = 0`` at ``r_max``. Cell
integrals of ``r^(k-1)`` and of ``V r^(k-1)`` are taken exactly, so the
Coulomb singularity at the origin node is harmless. The scheme is second
order; Richardson extrapolation over halved grids removes the leading
``h^2, h^3, h^4`` terms. Plain double precision is used throughout, which
limits the oracle to roughly 9 significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import OracleDivergenceError, UnsupportedParameterError
from .numerics import DEFAULT_DIGITS, big, working_precision
from .problem import ProblemSpec, _float


@dataclass(frozen=True)
class GridSpec:
    """``r_max=None`` selects the box radius (confined) or an adaptive cutoff (free)."""

    r_max: float | None = None
    m: int = 399
    richardson_levels: int = 3
    exponents: tuple = (2, 3, 4)
    tail: float = 40.0
    shift_tol: float = 1e-10
    divergence_tol: float = 1e-6
    max_cutoff_doublings: int = 4

    def __post_init__(self):
        if self.m < 100:
            raise ValueError("grid needs at least 100 interior points")
        if self.r_max is not None and self.r_max <= 0:
            raise ValueError("r_max must be > 0")
        if not 1 <= self.richardson_levels <= len(self.exponents):
            raise ValueError("richardson_levels must be between 1 and len(exponents)")


@dataclass
class OracleResult:
    energies: list
    r_max: float
    raw: list = field(default_factory=list)  # unextrapolated values per grid

    def energies_big(self, digits: int = DEFAULT_DIGITS) -> list:
        with working_precision(digits):
            return [big(float(x)) for x in self.energies]


def _moment(p: int, lo, hi):
    # integral of r^p over [lo, hi]; p >= -1 only arises as p = k - 2 >= 0
    return (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)


def discrete_levels(a: float, b: float, k: int, r_max: float, m: int, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the discretized problem on one grid."""
    if count > m:
        raise ValueError("count exceeds grid size")
    h = r_max / (m + 1)
    r = h * np.arange(m + 1)
    lo, hi = np.maximum(r - h / 2, 0.0), r + h / 2
    mass = _moment(k - 1, lo, hi)
    pot = -a * _moment(k - 2, lo, hi) + b * _moment(k + 1, lo, hi)
    stiff = _moment(k - 1, r, r + h) / h**2  # link i -- i+1
    diag = 0.5 * (stiff + np.concatenate(([0.0], stiff[:-1]))) + pot
    off = -0.5 * stiff[:-1]
    s = 1.0 / np.sqrt(mass)
    return eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:], select="i",
                            select_range=(0, count - 1))[0]


def richardson(values: list, exponents) -> tuple:
    """Extrapolate grid sequence (h halving) and return (best, previous-best)."""
    table = [np.asarray(v, dtype=float) for v in values]
    prev = table[-1]
    for p in exponents:
        if len(table) < 2:
            break
        f = 2.0**p
        prev = table[-1]
        table = [(f * table[i + 1] - table[i]) / (f - 1) for i in range(len(table) - 1)]
    return table[-1], prev


def _extrapolated(a, b, k, r_max, grid: GridSpec, count, m0=None):
    m0 = grid.m if m0 is None else m0
    levels = grid.richardson_levels
    raw = [discrete_levels(a, b, k, r_max, (m0 + 1) * 2**j - 1, count) for j in range(levels + 1)]
    best, prev = richardson(raw, grid.exponents[:levels])
    scale = np.maximum(np.abs(best), 1.0)
    if np.any(np.abs(best - prev) > grid.divergence_tol * scale):
        raise OracleDivergenceError(
            f"Richardson levels disagree: {best.tolist()} vs {prev.tolist()}")
    return best, raw


def default_cutoff(spec: ProblemSpec, count: int, tail: float = 40.0) -> float:
    """Radius beyond which the Gaussian tail is below ``exp(-tail)`` for ``count`` levels."""
    a, b, k = _float(spec.a), _float(spec.b), spec.k
    g = math.sqrt(b / 2)
    e_est = (2 * (count - 1) + k) * g + abs(a)
    r_turn2 = max(e_est, 1.0) / b
    return math.sqrt(r_turn2 + tail / g)


def fd_eigenvalues(spec: ProblemSpec, grid: GridSpec | None = None, count: int = 1,
                   digits: int = DEFAULT_DIGITS) -> list:
    """Lowest ``count`` eigenvalues as BigReal values (about 9 reliable digits)."""
    return fd_solve(spec, grid, count).energies_big(digits)


def fd_solve(spec: ProblemSpec, grid: GridSpec | None = None, count: int = 1) -> OracleResult:
    if count < 1 or count > 10:
        raise UnsupportedParameterError("the oracle handles 1..10 levels")
    grid = grid or GridSpec()
    a, b, k = _float(spec.a), _float(spec.b), spec.k
    if spec.bounded:
        r_max = _float(spec.R) if grid.r_max is None else min(grid.r_max, _float(spec.R))
        best, raw = _extrapolated(a, b, k, r_max, grid, count)
        return OracleResult(best.tolist(), r_max, raw)
    r_max = grid.r_max if grid.r_max is not None else default_cutoff(spec, count, grid.tail)
    m0 = grid.m
    best, raw = _extrapolated(a, b, k, r_max, grid, count, m0)
    for _ in range(grid.max_cutoff_doublings):
        # double the cutoff at fixed spacing so only the truncation changes; the
        # coarsest grid measures that shift free of the round-off that the
        # fine grids and the extrapolation carry (about 1e-10 relative)
        r_next, m_next = 2 * r_max, 2 * (m0 + 1) - 1
        nxt, raw_next = _extrapolated(a, b, k, r_next, grid, count, m_next)
        shift = np.max(np.abs(raw_next[0] - raw[0]) / np.maximum(np.abs(raw_next[0]), 1.0))
        if shift < grid.shift_tol:
            return OracleResult(best.tolist(), r_max, raw)
        best, raw, r_max, m0 = nxt, raw_next, r_next, m_next
    raise OracleDivergenceError(f"free-problem cutoff did not settle (last r_max={r_max})")
