"""Analytic energy estimates: uncertainty lower bound, envelope bounds, sum approximation.

Every estimate is a one-dimensional minimum over r of the form

    c2 / (2 r^2) - a / (p r) + b (q r)^2

whose stationarity condition is the quartic ``2 b q^2 r^4 + (a/p) r - c2 = 0``.
The quartic is convex on r > 0 with a negative value at 0, so it has exactly
one positive root; we bracket it geometrically and polish with the shared
root finder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import UnboundedBelowError, UnsupportedParameterError
from .numerics import DEFAULT_DIGITS, Bracket, big, find_root, minimize_unimodal, working_precision
from .problem import ProblemSpec, _float


@dataclass(frozen=True)
class QuantumNumbers:
    """Node count ``n``, angular momentum ``l`` and dimension ``d``."""

    n: int
    l: int
    d: int

    def __post_init__(self):
        if self.n < 0 or self.l < 0 or self.d < 2:
            raise UnsupportedParameterError(f"invalid quantum numbers {self}")

    @property
    def nu(self) -> Fraction:
        return self.n + self.l + Fraction(self.d - 1, 2)

    @property
    def P1(self) -> Fraction:
        return self.nu

    @property
    def P2(self) -> Fraction:
        return 2 * self.n + self.l + Fraction(self.d, 2)


@dataclass(frozen=True)
class BoundTriple:
    lower: object
    estimate: object
    upper: object


def _stationary_radius(c2, a, p, q2b, digits):
    """Positive root of ``2 q2b r^4 + (a/p) r - c2`` where ``q2b = b q^2``."""
    g = lambda r: 2 * q2b * r**4 + a / p * r - c2  # noqa: E731
    hi = big(1)
    while g(hi) <= 0:
        hi *= 2
    lo = hi / 2
    while g(lo) > 0:
        lo /= 2
        if lo == 0:
            raise ArithmeticError("stationary radius underflow")
    tol = hi * big(10) ** (-(digits - 5))
    return find_root(g, Bracket(lo, hi), tol, digits)


def _radial_min(c2, a, b, p, q, digits):
    """``min_{r>0} [c2/(2 r^2) - a/(p r) + b (q r)^2]`` for c2 > 0, b > 0."""
    with working_precision(digits):
        c2, a, b, p, q = big(c2), big(a), big(b), big(p), big(q)
        q2b = b * q * q

        def f(r):
            return c2 / (2 * r * r) - a / (p * r) + q2b * r * r

        def df(r):
            # same sign as the stationarity quartic
            return (2 * q2b * r**4 + a / p * r - c2) / r**3

        r_star = _stationary_radius(c2, a, p, q2b, digits)
        # golden section on a small bracket around the analytic root as a cross-check
        lo, hi = r_star / 2, r_star * 2
        tol = r_star * big(10) ** (-(digits - 5))
        r_min, value = minimize_unimodal(f, Bracket(lo, hi), tol, digits, dfdx=df)
        return r_min, value


def envelope_bounds(qn: QuantumNumbers, a, b, digits: int = DEFAULT_DIGITS):
    """Lower (Coulomb-tangent, P1) and upper (oscillator-tangent, P2) envelope bounds.

    The upper bound relies on V being concave in r^2, which holds for a >= 0;
    for a < 0 the returned "upper" value is the same formula but not a bound.
    """
    _check_b(b)
    _, lower = _radial_min(1, a, b, qn.P1, qn.P1, digits)
    _, upper = _radial_min(1, a, b, qn.P2, qn.P2, digits)
    return lower, upper


def sum_approximation(qn: QuantumNumbers, a, b, digits: int = DEFAULT_DIGITS):
    """Mixed estimate with P1 on the Coulomb term and P2 on the oscillator term."""
    _check_b(b)
    _, value = _radial_min(1, a, b, qn.P1, qn.P2, digits)
    return value


def bound_triple(qn: QuantumNumbers, a, b, digits: int = DEFAULT_DIGITS) -> BoundTriple:
    lower, upper = envelope_bounds(qn, a, b, digits)
    return BoundTriple(lower, sum_approximation(qn, a, b, digits), upper)


def uncertainty_lower_bound(spec: ProblemSpec, digits: int = DEFAULT_DIGITS):
    """``min_{0<r<=R} [(d-2)^2/(8 r^2) - a/r + b r^2]``, a lower bound on every level.

    In two dimensions the centrifugal barrier vanishes, so the bound is
    minus infinity for a > 0 and we raise instead.
    """
    with working_precision(digits):
        a, b = big(spec.a), big(spec.b)
        c2 = big(Fraction((spec.d - 2) ** 2, 4))
        if c2 == 0 and a > 0:
            raise UnboundedBelowError("d = 2 with a > 0: -a/r is unbounded below at the origin")
        if c2 == 0 and a == 0:
            return big(0)

        def f(r):
            return c2 / (2 * r * r) - a / r + b * r * r

        if c2 == 0:
            # |a|/r + b r^2: stationary at r^3 = -a/(2b)
            r_star = gmpy2.cbrt(-a / (2 * b))
        else:
            r_star = _stationary_radius(c2, a, 1, b, digits)
        if spec.R is not None:
            R = big(spec.R)
            if r_star >= R:
                return f(R)
        return f(r_star)


def fig1_curve(a, b, d: int, n_values, l_max: int, digits: int = DEFAULT_DIGITS):
    """Sum-approximation energies on an (n, l) grid as ``(n, l, E)`` rows."""
    rows = []
    for n in n_values:
        for l in range(l_max + 1):
            rows.append((n, l, sum_approximation(QuantumNumbers(n, l, d), a, b, digits)))
    return rows


def _check_b(b):
    if _float(b) <= 0:
        raise UnsupportedParameterError("b must be > 0")
