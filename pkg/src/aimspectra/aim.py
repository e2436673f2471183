"""Asymptotic iteration method eigensolver for the free and box-confined problems.

After factoring out the known behaviour at the origin, at infinity (Gaussian)
and, when confined, at the wall, the remaining factor f solves

    f'' = lambda_0(r) f' + s_0(r) f.

Differentiating repeatedly gives the sequences

    lambda_n = lambda_{n-1}' + s_{n-1} + lambda_0 lambda_{n-1}
    s_n      = s_{n-1}'      + s_0 lambda_{n-1}

and the energies are the zeros in E of
``delta_N = lambda_N s_{N-1} - lambda_{N-1} s_N`` at a fixed point r0.

lambda_n and s_n are carried as truncated Taylor series about r0; each
iteration consumes one derivative order, so the seeds are expanded to order
N + 2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import gmpy2

from .bounds import QuantumNumbers, envelope_bounds, sum_approximation
from .errors import (
    BracketFailureError,
    InsufficientOrderError,
    NonConvergenceError,
    SeedPointError,
)
from .numerics import (
    DEFAULT_DIGITS,
    Bracket,
    TruncatedSeries,
    big,
    convolve,
    find_root,
    series_from_rational,
    working_precision,
)
from .problem import ProblemSpec

log = logging.getLogger(__name__)

N_START = 16
N_STEP = 5
N_MAX = 200


@dataclass(frozen=True)
class AimState:
    lam: TruncatedSeries
    s: TruncatedSeries
    n: int = 0


@dataclass(frozen=True)
class EigenvalueResult:
    E: object
    n_index: int
    iterations: int
    residual: object
    digits_converged: int
    spec: ProblemSpec | None = None
    r0: object = None
    history: tuple = field(default=(), repr=False)


FREE_R0 = 3


def default_r0(spec: ProblemSpec, digits: int = DEFAULT_DIGITS):
    """R/2 inside a box, 3 for the free problem.

    Large boxes use the free value instead of R/2: deep in the Gaussian tail
    the expansion point no longer resolves the low levels.
    """
    with working_precision(digits):
        if spec.bounded:
            return min(big(spec.R) / 2, big(FREE_R0))
        return big(FREE_R0)


def seed_free(spec: ProblemSpec, E, r0, order: int, digits: int = DEFAULT_DIGITS) -> AimState:
    """lambda_0 = 2 sqrt(2b) r - (k-1)/r,  s_0 = -(2E - k sqrt(2b)) - 2a/r."""
    if spec.bounded:
        raise ValueError("seed_free needs an unbounded problem")
    with working_precision(digits):
        r0 = big(r0)
        if r0 <= 0:
            raise SeedPointError(f"expansion point must be > 0, got {r0}")
        w = gmpy2.sqrt(2 * big(spec.b))
        k = spec.k
        inv_r = series_from_rational([1], [(0, 1)], r0, order, digits)
        r = TruncatedSeries.from_polynomial([0, 1], r0, order, digits)
        lam = r * (2 * w) + inv_r * (-(k - 1))
        s = inv_r * (-2 * big(spec.a)) + (-(2 * big(E) - k * w))
        return AimState(lam, s)


def seed_confined(spec: ProblemSpec, E, r0, order: int, digits: int = DEFAULT_DIGITS) -> AimState:
    """Seeds for the box problem, 0 < r0 < R.

    lambda_0 = -2[(k-1)/(2r) - 1/(R-r) - sqrt(2b) r]
    s_0 = -[(-2E + (k+2)w) r^2 + (R(2E - k w) - 2a) r + 2Ra - k + 1] / (r (R-r)),  w = sqrt(2b)
    """
    if not spec.bounded:
        raise ValueError("seed_confined needs a bounded problem")
    with working_precision(digits):
        r0, R = big(r0), big(spec.R)
        if not 0 < r0 < R:
            raise SeedPointError(f"expansion point must lie in (0, R={R}), got {r0}")
        w = gmpy2.sqrt(2 * big(spec.b))
        a, E, k = big(spec.a), big(E), spec.k
        inv_r = series_from_rational([1], [(0, 1)], r0, order, digits)
        inv_wall = series_from_rational([-1], [(R, 1)], r0, order, digits)  # 1/(R - r)
        r = TruncatedSeries.from_polynomial([0, 1], r0, order, digits)
        lam = inv_r * (-(k - 1)) + inv_wall * 2 + r * (2 * w)
        quad = -2 * E + (k + 2) * w
        lin = R * (2 * E - k * w) - 2 * a
        const = 2 * R * a - k + 1
        # -P/(r(R - r)) = P/(r(r - R))
        s = series_from_rational([const, lin, quad], [(0, 1), (R, 1)], r0, order, digits)
        return AimState(lam, s)


def seed(spec: ProblemSpec, E, r0, order: int, digits: int = DEFAULT_DIGITS) -> AimState:
    if spec.bounded:
        return seed_confined(spec, E, r0, order, digits)
    return seed_free(spec, E, r0, order, digits)


def aim_step(state: AimState, seed0: AimState) -> AimState:
    """One application of the recursion, dropping one series order."""
    lam_d = state.lam.derivative()
    s_d = state.s.derivative()
    lam = lam_d + state.s + seed0.lam * state.lam
    s = s_d + seed0.s * state.lam
    return AimState(lam, s, state.n + 1)


def aim_sequence(state0: AimState, N: int):
    """Yield the states n = 0..N built with series arithmetic."""
    state = state0
    yield state
    for _ in range(N):
        state = aim_step(state, state0)
        yield state


def _delta_terms(lam0, s0, N):
    # Raw-list kernel at the caller's precision; work at order N - n on step n.
    lam0 = lam0[: N + 1]
    s0 = s0[: N + 1]
    lam, s = lam0, s0
    lam_prev = s_prev = None
    for n in range(1, N + 1):
        m = N - n
        c_ll = convolve(lam0, lam, m)
        c_sl = convolve(s0, lam, m)
        new_lam = [(j + 1) * lam[j + 1] + s[j] + c_ll[j] for j in range(m + 1)]
        new_s = [(j + 1) * s[j + 1] + c_sl[j] for j in range(m + 1)]
        lam_prev, s_prev = lam, s
        lam, s = new_lam, new_s
    t1 = lam[0] * s_prev[0]
    t2 = lam_prev[0] * s[0]
    return t1 - t2, max(abs(t1), abs(t2))


def iterate_delta(state0: AimState, N: int) -> object:
    """delta_N at the expansion point after N iterations."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if state0.lam.order < N + 1 or state0.s.order < N + 1:
        raise InsufficientOrderError(
            f"seed order {min(state0.lam.order, state0.s.order)} is too small for N={N}")
    with working_precision(max(state0.lam.digits, state0.s.digits)):
        return _delta_terms(state0.lam.coeffs, state0.s.coeffs, N)[0]


class TerminationFunction:
    """E -> delta_N(E) for one problem, expansion point and precision.

    The seeds are expanded once; E enters s_0 only as the constant shift -2E
    (both for the free and the confined seed), so each evaluation only
    replaces one coefficient.
    """

    def __init__(self, spec: ProblemSpec, r0=None, max_order: int = N_MAX + 2,
                 digits: int = DEFAULT_DIGITS):
        self.spec = spec
        self.digits = digits
        self.max_order = max_order
        with working_precision(digits):
            self.r0 = big(r0) if r0 is not None else default_r0(spec, digits)
            base = seed(spec, 0, self.r0, max_order, digits)
        self.lam0 = base.lam.coeffs
        self.s0_base = base.s.coeffs

    def terms(self, E, N: int):
        if N + 1 > self.max_order:
            raise InsufficientOrderError(f"N={N} exceeds the order budget {self.max_order - 1}")
        with working_precision(self.digits):
            s0 = (self.s0_base[0] - 2 * big(E),) + self.s0_base[1:]
            return _delta_terms(self.lam0, s0, N)

    def __call__(self, E, N: int):
        return self.terms(E, N)[0]

    def relative_residual(self, E, N: int):
        delta, scale = self.terms(E, N)
        with working_precision(self.digits):
            return abs(delta) / scale if scale != 0 else abs(delta)


def _float(x) -> float:
    return float(big(x)) if not isinstance(x, float) else x


def _scan_setup(spec: ProblemSpec, count: int, digits: int):
    """Scan start, step and initial upper limit for locating the first ``count`` roots."""
    a, b = spec.a, spec.b
    sums = [_float(sum_approximation(QuantumNumbers(n, spec.l, spec.d), a, b, 30))
            for n in range(count + 1)]
    gap = min(sums[i + 1] - sums[i] for i in range(count))
    lower0, _ = envelope_bounds(QuantumNumbers(0, spec.l, spec.d), a, b, 30)
    lower0 = _float(lower0)
    w = math.sqrt(2 * _float(b))
    af = _float(a)
    if not spec.bounded:
        step = gap / 4
        _, upper = envelope_bounds(QuantumNumbers(count - 1, spec.l, spec.d), a, b, 30)
        cap = _float(upper) if af >= 0 else sums[count - 1] + 4 * abs(af) * w ** 0.5 + gap
        cap += gap
    else:
        R = _float(spec.R)
        nu = (spec.k - 2) / 2
        beta = (count + nu / 2 - 0.25) * math.pi
        j = beta - (4 * nu * nu - 1) / (8 * beta)
        box = j * j / (2 * R * R)
        step = min(w / 2, gap / 4, math.pi ** 2 / (8 * R * R))
        cap = box + _float(b) * R * R + 4 * abs(af) * spec.k / R + step
        cap = max(cap, lower0 + 2 * step)
    return lower0 - step, step, cap


def scan_brackets(spec: ProblemSpec, count: int, term: TerminationFunction,
                  n_scan: int = N_START, n_max: int = N_MAX):
    """Brackets around the lowest ``count`` zeros of delta_N in ascending E.

    The energy axis is stepped upward from below the ground-state lower bound;
    each sign change of delta_N is one level.  If too few sign changes are
    found below the plausibility limit, N is doubled and the scan repeated
    over a wider range.  Returns ``(brackets, N)``.
    """
    lo, step, cap = _scan_setup(spec, count, term.digits)
    trace = []
    while True:
        found = []
        with working_precision(term.digits):
            x_prev = big(lo)
            f_prev = term(x_prev, n_scan)
            trace.append((float(x_prev), _sgn(f_prev)))
            i = 0
            while len(found) < count:
                i += 1
                x = big(lo) + i * big(step)
                if x > cap:
                    break
                fx = term(x, n_scan)
                sx = _sgn(fx)
                trace.append((float(x), sx))
                if sx == 0:
                    continue
                if _sgn(f_prev) != 0 and sx != _sgn(f_prev):
                    found.append(Bracket(x_prev, x))
                x_prev, f_prev = x, fx
        if len(found) == count:
            log.debug("scan %s: %d brackets at N=%d", spec.label(), count, n_scan)
            return found, n_scan
        if n_scan * 2 > n_max:
            raise BracketFailureError(
                f"found {len(found)} of {count} sign changes of delta_N up to E={cap:.6g} "
                f"for {spec.label()}", trace)
        n_scan *= 2
        cap = cap + (cap - lo)


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _refine(term: TerminationFunction, bracket: Bracket, n_index: int, tol, n_first: int,
            n_step: int, n_max: int) -> EigenvalueResult:
    digits = term.digits
    with working_precision(digits):
        tol = big(tol)
        root_tol = tol / 1000
        E_prev = find_root(lambda E: term(E, n_first), bracket, root_tol, digits)
        history = [(n_first, E_prev)]
        width = bracket.width
        N = n_first
        while True:
            N += n_step
            if N > n_max:
                raise NonConvergenceError(
                    f"level {n_index} of {term.spec.label()} not converged to {tol} by N={n_max}; "
                    f"last estimates {history[-2:]}")
            f = lambda E, N=N: term(E, N)  # noqa: E731
            br = _bracket_near(f, E_prev, width, digits)
            E = find_root(f, br, root_tol, digits, coarse_steps=1)
            history.append((N, E))
            change = abs(E - E_prev)
            if change < tol:
                break
            width = max(4 * change, root_tol)
            E_prev = E
        residual = term.relative_residual(E, N)
        # the root finder only resolves E to root_tol, so identical roots prove no more
        spread = max(change, root_tol)
        scale = max(abs(E), big(1e-300))
        converged = max(0, min(digits, int(math.floor(-math.log10(float(spread / scale))))))
        return EigenvalueResult(E, n_index, N, residual, converged, term.spec, term.r0, tuple(history))


def _bracket_near(f, x, width, digits):
    # Grow a symmetric window around the previous estimate until delta_N changes sign.
    w = big(width)
    trace = []
    for _ in range(60):
        lo, hi = x - w, x + w
        flo, fhi = _sgn(f(lo)), _sgn(f(hi))
        trace += [(lo, flo), (hi, fhi)]
        if flo * fhi <= 0:
            return Bracket(lo, hi)
        w *= 2
    raise BracketFailureError(f"no sign change of delta_N near E={x}", trace)


def _default_tol(digits: int):
    with working_precision(digits):
        return big(10) ** (-(digits // 3))


def spectrum(spec: ProblemSpec, count: int, tol=None, digits: int = DEFAULT_DIGITS, r0=None,
             n_start: int = N_START, n_step: int = N_STEP, n_max: int = N_MAX) -> list:
    """The lowest ``count`` eigenvalues of the (d, l) subspace, ascending.

    Each level is refined by solving delta_N(E) = 0 for N = n_start,
    n_start + n_step, ... until two successive roots agree to ``tol``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    tol = _default_tol(digits) if tol is None else tol
    term = TerminationFunction(spec, r0, n_max + 2, digits)
    brackets, n_scan = scan_brackets(spec, count, term, n_start, n_max)
    results = [_refine(term, br, i, tol, n_scan, n_step, n_max) for i, br in enumerate(brackets)]
    with working_precision(digits):
        for lo, hi in zip(results, results[1:]):
            if not hi.E - lo.E > big(tol):
                raise NonConvergenceError(
                    f"levels {lo.n_index} and {hi.n_index} converged to the same root {lo.E}")
    return results


def eigenvalue(spec: ProblemSpec, n_index: int, tol=None, digits: int = DEFAULT_DIGITS, r0=None,
               n_start: int = N_START, n_step: int = N_STEP, n_max: int = N_MAX) -> EigenvalueResult:
    """The ``n_index``-th eigenvalue (0 = ground state) of the (d, l) subspace."""
    if n_index < 0:
        raise ValueError("n_index must be >= 0")
    tol = _default_tol(digits) if tol is None else tol
    term = TerminationFunction(spec, r0, n_max + 2, digits)
    brackets, n_scan = scan_brackets(spec, n_index + 1, term, n_start, n_max)
    return _refine(term, brackets[-1], n_index, tol, n_scan, n_step, n_max)
