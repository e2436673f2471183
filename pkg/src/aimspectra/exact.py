"""Quasi-exact solutions of the free and hard-wall confined problems.

Both cases use the ansatz ``u(r) = r^((k-1)/2) exp(-sqrt(b/2) r^2) P(r)``, where
``P = f_n`` for the free problem and ``P = (R - r) f_n`` inside the box. The
energy is fixed by the degree of ``f_n`` and the potential parameters must
satisfy one (free) or two (confined) polynomial constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
import mpmath

from . import odepoly
from .errors import (AimSpectraError, DegenerateParameterError, NotExactlySolvableError,
                     UnsupportedParameterError)
from .numerics import DEFAULT_DIGITS, big, working_precision
from .odepoly import BandEntries, OdeClass54, poly_add, poly_mul, poly_deriv, poly_eval
from .problem import ProblemSpec


@dataclass(frozen=True)
class RadialSolution:
    """``u(r) = r^power * exp(-gauss_width r^2) * [(R - r)] * sum(poly[i] r^i)``."""

    power: object
    gauss_width: object
    box_factor: bool
    poly: tuple
    E: object
    R: object = None

    def full_poly(self) -> list:
        """Polynomial multiplying ``r^power exp(-gauss_width r^2)``."""
        if not self.box_factor:
            return list(self.poly)
        return poly_mul([big(self.R), big(-1)], list(self.poly))

    def __call__(self, r, digits: int = DEFAULT_DIGITS):
        with working_precision(digits):
            r = big(r)
            return (r ** self.power * gmpy2.exp(-self.gauss_width * r * r)
                    * poly_eval(self.full_poly(), r))


@dataclass(frozen=True)
class ConstraintReport:
    necessary_E: object
    residuals: list
    satisfied: bool
    printed: list = field(default_factory=list)
    tolerance: object = None


def _tolerance(digits: int):
    return big(10) ** (-(digits // 2))


def _w(b):
    return gmpy2.sqrt(2 * big(b))


def _require_free(spec: ProblemSpec):
    if spec.bounded:
        raise UnsupportedParameterError("expected a free (R = inf) problem")


def _require_confined(spec: ProblemSpec):
    if not spec.bounded:
        raise UnsupportedParameterError("expected a confined (finite R) problem")


# free problem ----------------------------------------------------------------

def free_energy_candidate(nprime: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS):
    """``(2n' + k) sqrt(b/2)``."""
    _require_free(spec)
    if nprime < 0:
        raise ValueError("nprime must be >= 0")
    with working_precision(digits):
        return (2 * nprime + spec.k) * gmpy2.sqrt(big(spec.b) / 2)


def free_band_entries(nprime: int, a, k: int, w) -> BandEntries:
    """Tridiagonal entries of the free-problem determinant for degree ``nprime``."""
    idx = range(nprime + 1)
    beta = [-2 * a for _ in idx]
    alpha = [-i * (i + k - 2) for i in idx]
    gamma = [-2 * (nprime - i + 1) * w for i in idx]
    return BandEntries(beta, alpha, gamma)


def table1_closed_form(nprime: int, a, b, k: int):
    """Printed closed forms of the free constraint for ``nprime <= 5``.

    They equal the determinant up to the constant factors
    -2, 2, -8, 4, -32, 8 (for nprime = 0..5).
    """
    w = gmpy2.sqrt(2 * b)
    forms = {
        0: lambda: a,
        1: lambda: 2 * a**2 - (k - 1) * w,
        2: lambda: a * (a**2 - (2 * k - 1) * w),
        3: lambda: 4 * a**4 - 20 * a**2 * w * k - 18 * b * (1 - k * k),
        4: lambda: a * (a**4 - 5 * w * (2 * k + 1) * a**2 + 4 * b * (8 * k * k + 8 * k - 7)),
        5: lambda: (8 * a**6 - 140 * w * (k + 1) * a**4 + 4 * b * (-65 + 518 * k + 259 * k * k) * a**2
                    - 450 * b * w * (k - 1) * (k + 3) * (k + 1)),
    }
    if nprime not in forms:
        raise ValueError("closed forms are tabulated for nprime <= 5 only")
    return forms[nprime]()


TABLE1_SCALE = {0: -2, 1: 2, 2: -8, 3: 4, 4: -32, 5: 8}


def free_constraint(nprime: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> ConstraintReport:
    """Determinant condition for a degree-``nprime`` free solution."""
    _require_free(spec)
    E = free_energy_candidate(nprime, spec, digits)
    with working_precision(digits):
        a, b = big(spec.a), big(spec.b)
        entries = free_band_entries(nprime, a, spec.k, _w(b))
        delta = odepoly.band_determinant(entries, nprime + 1, digits)
        printed = [table1_closed_form(nprime, a, b, spec.k)] if nprime <= 5 else []
        tol = _tolerance(digits)
        return ConstraintReport(E, [delta], abs(delta) < tol, printed, tol)


def free_constraint_poly_in_w(nprime: int, a, k: int, digits: int = DEFAULT_DIGITS) -> list:
    """The determinant as a polynomial in ``w = sqrt(2b)`` (ascending coefficients)."""
    with working_precision(digits):
        a = big(a)
        d_prev2, d_prev = [big(0)], [big(1)]
        for i in range(1, nprime + 2):
            term = [-2 * a * c for c in d_prev]
            if i >= 2:
                # gamma_{i-1} alpha_{i-1} = [-2 (n'-i+2) w] [-(i-1)(i+k-3)]
                g = 2 * (nprime - i + 2) * (i - 1) * (i + k - 3)
                term = poly_add(term, [big(0)] + [-g * c for c in d_prev2])
            d_prev2, d_prev = d_prev, term
        return d_prev


def solve_b_for_free_constraint(nprime: int, a, k: int, digits: int = DEFAULT_DIGITS) -> list:
    """Positive ``b`` values, ascending, at which the free constraint holds.

    For ``nprime = 0`` the constraint is ``a = 0`` with no ``b`` dependence, so
    the result is empty.
    """
    if k < 2:
        raise UnsupportedParameterError("k must be >= 2")
    poly = free_constraint_poly_in_w(nprime, a, k, digits)
    with working_precision(digits):
        roots = poly_real_roots(poly, None, digits).roots
        return sorted(w * w / 2 for w in roots)


def free_solution(nprime: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> RadialSolution:
    """Exact free solution; the constraint must hold."""
    report = free_constraint(nprime, spec, digits)
    if not report.satisfied:
        raise NotExactlySolvableError(
            f"free constraint for n'={nprime} not satisfied (residual {float(report.residuals[0]):.3e})")
    with working_precision(digits):
        a, b, k = big(spec.a), big(spec.b), spec.k
        w = _w(b)
        c = [big(1)]
        prev = big(0)
        for i in range(nprime):
            nxt = -(2 * a * c[i] + 2 * (nprime - i + 1) * w * prev) / ((i + 1) * (i + k - 1))
            prev = c[i]
            c.append(nxt)
        return RadialSolution(big(k - 1) / 2, gmpy2.sqrt(b / 2), False, tuple(c), report.necessary_E)


# root analysis ---------------------------------------------------------------

@dataclass(frozen=True)
class RootReport:
    roots: list
    descartes_bound: int


def descartes_bound(poly: Sequence) -> int:
    """Sign variations of the coefficient sequence (bound on positive roots)."""
    signs = [c > 0 for c in poly if c != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def _poly_rem(ctx, num, den, tol):
    # remainder of descending-order polynomials, dropping negligible leading terms
    num = list(num)
    while len(num) >= len(den):
        q = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= q * den[i]
        num.pop(0)
    scale = max([abs(c) for c in num] + [ctx.one])
    while num and abs(num[0]) <= tol * scale:
        num.pop(0)
    return num


def _poly_div(num, den):
    num, out = list(num), []
    while len(num) >= len(den):
        q = num[0] / den[0]
        out.append(q)
        for i in range(len(den)):
            num[i] -= q * den[i]
        num.pop(0)
    return out


def _squarefree(ctx, coeffs, digits):
    """``p / gcd(p, p')`` for descending coefficients, with a numerical gcd."""
    deg = len(coeffs) - 1
    deriv = [c * (deg - i) for i, c in enumerate(coeffs[:-1])]
    tol = ctx.mpf(10) ** (-(digits // 2))
    a, b = [c / coeffs[0] for c in coeffs], deriv
    while b:
        a, b = b, _poly_rem(ctx, a, b, tol)
    return _poly_div(coeffs, a) if len(a) > 1 else coeffs


def poly_real_roots(poly: Sequence, upper=None, digits: int = DEFAULT_DIGITS) -> RootReport:
    """Real roots in ``(0, upper)`` (``upper=None`` for ``(0, inf)``), ascending."""
    with working_precision(digits):
        coeffs = [big(c) for c in poly]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    bound = descartes_bound(coeffs)
    # strip roots at zero
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) == 1:
        return RootReport([], bound)
    ctx = mpmath.MPContext()
    ctx.dps = digits + 10
    mcoeffs = [ctx.mpf(str(c)) for c in reversed(coeffs)]
    try:
        roots = ctx.polyroots(mcoeffs, maxsteps=400, extraprec=4 * ctx.prec)
    except ctx.NoConvergence:
        # repeated roots stall the iteration; solve the square-free part instead
        roots = ctx.polyroots(_squarefree(ctx, mcoeffs, digits), maxsteps=400,
                              extraprec=4 * ctx.prec)
    eps = ctx.mpf(10) ** (-(digits // 2))
    out = []
    with working_precision(digits):
        for z in roots:
            z = ctx.mpc(z)
            if abs(z.imag) > eps * max(1, abs(z.real)):
                continue
            x = big(str(z.real))
            if x <= 0 or (upper is not None and x >= big(upper)):
                continue
            out.append(x)
    return RootReport(sorted(out), bound)


# confined problem ------------------------------------------------------------

def confined_energy_candidate(n: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS):
    """``(2n + k + 2) sqrt(2b) / 2``."""
    _require_confined(spec)
    if n < 0:
        raise ValueError("n must be >= 0")
    with working_precision(digits):
        return (2 * n + spec.k + 2) * _w(spec.b) / 2


def confined_ode(spec: ProblemSpec, E, digits: int = DEFAULT_DIGITS) -> OdeClass54:
    """Coefficients of the equation for ``f_n`` inside the box."""
    with working_precision(digits):
        a, R, E, k = big(spec.a), big(spec.R), big(E), spec.k
        w = _w(spec.b)
        a4 = (big(0), big(0), big(-1), R, big(0))
        a3 = (2 * w, -2 * w * R, big(-(k + 1)), (k - 1) * R)
        tau = (2 * E - (k + 2) * w, -(R * (2 * E - k * w) - 2 * a), -2 * R * a + k - 1)
        return OdeClass54(a4, a3, tau)


def confined_printed_conditions(n: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> list:
    """The printed parameter relations for n = 0, 1, 2 (each vanishes on the exact family)."""
    with working_precision(digits):
        a, R, b, k = big(spec.a), big(spec.R), big(spec.b), spec.k
        w = _w(b)
        if n == 0:
            return [a - R * w, R * a - big(k - 1) / 2]
        if n == 1:
            return [2 * k * R * a - k * (k - 1) - 2 * R * R * a * a + 2 * R * R * w * (k - 1),
                    2 * w * R * R - 2 * R * a + k - 1]
        if n == 2:
            return [4 * R**3 * a**3 - 6 * (k + 1) * R * R * a * a
                    - 2 * R * (R * R * w * (7 * k - 3) - 3 * k * (k + 1)) * a
                    + 3 * (k - 1) * (k + 1) * (3 * w * R * R - k),
                    2 * R * R * a**3 - 2 * R * (R * R * w + k) * a * a
                    - (k - 1) * (3 * w * R * R - k) * a + 6 * b * (k - 1) * R**3]
        return []


def confined_constraint(n: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> ConstraintReport:
    """Closure residuals of the five-term recurrence at the candidate energy."""
    _require_confined(spec)
    E = confined_energy_candidate(n, spec, digits)
    ode = confined_ode(spec, E, digits)
    printed = confined_printed_conditions(n, spec, digits)
    tol = _tolerance(digits)
    try:
        residuals = list(odepoly.sufficiency_residuals_54(ode, n, digits))
    except DegenerateParameterError:
        if n > 2:
            raise
        # singular leading block: fall back to the explicit determinants
        residuals = list(odepoly.explicit_determinants_54(ode, n, digits))
    satisfied = all(abs(x) < tol for x in residuals)
    return ConstraintReport(E, residuals, satisfied, printed, tol)


def confined_parameter_family(n: int, branch: str, k: int, R, digits: int = DEFAULT_DIGITS):
    """Closed-form ``(a, b, E)`` families for n = 0 and n = 1 (branch '+' or '-')."""
    if k < 2:
        raise UnsupportedParameterError("k must be >= 2")
    with working_precision(digits):
        R = big(R)
        if R <= 0:
            raise UnsupportedParameterError("R must be > 0")
        if n == 0:
            a = big(k - 1) / (2 * R)
            b = big((k - 1) ** 2) / (8 * R**4)
            E = big((k - 1) * (k + 2)) / (4 * R * R)
            return a, b, E
        if n == 1:
            if branch not in ("+", "-"):
                raise ValueError("branch must be '+' or '-'")
            s = gmpy2.sqrt(big(2 * k - 1)) * (1 if branch == "+" else -1)
            a = (2 * k - 1 + s) / (2 * R)
            b = (k + s) ** 2 / (8 * R**4)
            E = (k + 4) * (k + s) / (4 * R * R)
            return a, b, E
    raise UnsupportedParameterError("closed-form confined families exist only for n = 0, 1")


def confined_n2_parameters(k: int, R, digits: int = DEFAULT_DIGITS) -> list:
    """All ``(a, b, E)`` with a degree-2 confined solution at radius ``R``.

    Seeds come from the nodes of degree-3 free solutions (the free constraint
    and node positions scale exactly as ``a ~ 1/L``, ``sqrt(2b) ~ 1/L^2``), and
    are polished by a 2-D Newton iteration on the two printed conditions in
    ``(a, sqrt(2b))``.
    """
    out = []
    with working_precision(digits):
        R = big(R)
        for a1 in (big(1), big(-1)):
            for b1 in solve_b_for_free_constraint(3, a1, k, digits):
                sol = free_solution(3, ProblemSpec(a1, b1, d=k, l=0), digits)
                for rho in poly_real_roots(list(sol.poly), None, digits).roots:
                    a0, w0 = a1 * rho / R, _w(b1) * rho * rho / (R * R)
                    a, w = _newton_n2(k, R, a0, w0, digits)
                    b = w * w / 2
                    out.append((a, b, (k + 6) * w / 2))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _newton_n2(k, R, a, w, digits, max_iter=60):
    tol = big(10) ** (-(digits - 5))

    def F(a, w):
        spec = ProblemSpec(a, w * w / 2, d=k, l=0, R=R)
        return confined_printed_conditions(2, spec, digits)

    for _ in range(max_iter):
        f1, f2 = F(a, w)
        ha = abs(a) * big(10) ** (-(digits // 3)) + big(10) ** (-(digits // 3))
        hw = abs(w) * big(10) ** (-(digits // 3))
        g1a, g2a = F(a + ha, w)
        g1w, g2w = F(a, w + hw)
        j11, j21 = (g1a - f1) / ha, (g2a - f2) / ha
        j12, j22 = (g1w - f1) / hw, (g2w - f2) / hw
        det = j11 * j22 - j12 * j21
        if det == 0:
            raise AimSpectraError("singular Jacobian in confined n=2 solve")
        da = (f1 * j22 - f2 * j12) / det
        dw = (j11 * f2 - j21 * f1) / det
        a, w = a - da, w - dw
        if abs(da) <= tol * max(1, abs(a)) and abs(dw) <= tol * max(1, abs(w)):
            break
    return a, w


def confined_solution(n: int, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> RadialSolution:
    """Exact confined solution with the ``(R - r)`` factor; the constraint must hold."""
    report = confined_constraint(n, spec, digits)
    if not report.satisfied:
        raise NotExactlySolvableError(
            f"confined constraint for n={n} not satisfied (residuals "
            f"{[float(x) for x in report.residuals]})")
    ode = confined_ode(spec, report.necessary_E, digits)
    with working_precision(digits):
        c = odepoly.poly_coeffs_54(ode, n, digits)
        return RadialSolution(big(spec.k - 1) / 2, gmpy2.sqrt(big(spec.b) / 2), True, tuple(c),
                              report.necessary_E, big(spec.R))


def radial_residual(sol: RadialSolution, spec: ProblemSpec, digits: int = DEFAULT_DIGITS) -> list:
    """Coefficients of ``r^2 u''/g + r^2 (2E + 2a/r - 2b r^2 - (k-1)(k-3)/(4r^2)) u/g``
    with ``g = r^power exp(-gauss_width r^2)``; identically zero for an exact solution."""
    with working_precision(digits):
        P = [big(c) for c in sol.full_poly()]
        p, g = big(sol.power), big(sol.gauss_width)
        a, b, E, k = big(spec.a), big(spec.b), big(sol.E), spec.k
        d1, d2 = poly_deriv(P), poly_deriv(poly_deriv(P))
        h = [p, big(0), -2 * g]  # r * (log g)' = p - 2 g r^2
        h2 = poly_mul(h, h)
        zeroth = poly_add(h2, [-p, big(0), -2 * g],
                          [-big((k - 1) * (k - 3)) / 4, 2 * a, 2 * E, big(0), -2 * b])
        return poly_add(poly_mul([big(0), big(0), big(1)], d2),
                        poly_mul([big(0), 2 * p, big(0), -4 * g], d1),
                        poly_mul(zeroth, P))


def confined_free_node_link(nprime: int, spec_free: ProblemSpec, digits: int = DEFAULT_DIGITS,
                            check: bool = True, tol=None) -> list:
    """``(R, E)`` for each positive node of the free solution.

    With ``check`` the confined problem at radius ``R`` is solved by AIM and
    its level with the same node count must equal ``E``.
    """
    from .aim import eigenvalue

    sol = free_solution(nprime, spec_free, digits)
    nodes = poly_real_roots(list(sol.poly), None, digits).roots
    out = []
    for j, rho in enumerate(nodes):
        out.append((rho, sol.E))
        if check:
            conf = spec_free.with_(R=to_str(rho, digits))
            res = eigenvalue(conf, j, digits=digits)
            lim = tol if tol is not None else big(10) ** (-(digits // 4))
            if abs(res.E - sol.E) > lim:
                raise AimSpectraError(
                    f"confined level {j} at R={float(rho)} is {res.E}, expected {sol.E}")
    return out


def to_str(x, digits: int) -> str:
    return format(x, f".{digits + 5}g")
