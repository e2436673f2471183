"""Extended-precision reals, truncated power series and 1-D root finding.

All values are ``gmpy2.mpfr``.  Precision is always passed explicitly as a
number of decimal ``digits``; every public function enters its own
``gmpy2`` context (contexts are thread local) so nothing depends on, or
mutates, process-wide precision settings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2
from gmpy2 import mpfr

from .errors import BracketError, EvaluationError, NotUnimodalError, PoleAtCenterError

DEFAULT_DIGITS = 60
GUARD_BITS = 8

BigReal = type(mpfr(0))

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bits_for(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + GUARD_BITS


def working_precision(digits: int = DEFAULT_DIGITS):
    """Context manager running mpfr arithmetic at ``digits`` decimal digits."""
    return gmpy2.context(precision=bits_for(digits))


def big(x) -> BigReal:
    """Convert ``x`` (int, float, str, Fraction, mpfr) at the active precision."""
    if isinstance(x, Fraction):
        return mpfr(x.numerator) / mpfr(x.denominator)
    if isinstance(x, BigReal):
        return +x
    if isinstance(x, str) and "/" in x:
        return big(Fraction(x))
    return mpfr(x)


def to_decimal_string(x, places: int) -> str:
    """Fixed-point decimal string with ``places`` digits after the point."""
    s = format(x, f".{places}f")
    if s.startswith("-") and set(s[1:]) <= set("0."):
        s = s[1:]
    return s


def is_finite(x) -> bool:
    return gmpy2.is_finite(x) if isinstance(x, BigReal) else math.isfinite(x)


@dataclass(frozen=True)
class TruncatedSeries:
    """Taylor polynomial ``sum_j coeffs[j] (r - center)**j`` of order ``len(coeffs) - 1``.

    Arithmetic between two series truncates to the smaller order and runs at
    the larger of the two precisions.
    """

    center: BigReal
    coeffs: tuple
    digits: int = DEFAULT_DIGITS

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> BigReal:
        return self.coeffs[0]

    @classmethod
    def constant(cls, c, center, order: int, digits: int = DEFAULT_DIGITS) -> "TruncatedSeries":
        with working_precision(digits):
            zero = mpfr(0)
            return cls(big(center), (big(c),) + (zero,) * order, digits)

    @classmethod
    def from_polynomial(cls, poly: Sequence, center, order: int,
                        digits: int = DEFAULT_DIGITS) -> "TruncatedSeries":
        """Re-expand ``sum_i poly[i] r**i`` about ``center``."""
        with working_precision(digits):
            c = big(center)
            shifted = _taylor_shift([big(p) for p in poly], c)
            shifted = (shifted + [mpfr(0)] * (order + 1))[: order + 1]
            return cls(c, tuple(shifted), digits)

    def _pair(self, other):
        if isinstance(other, TruncatedSeries):
            if other.center != self.center:
                raise ValueError("series expanded about different centers")
            m = min(self.order, other.order)
            return self.coeffs[: m + 1], other.coeffs[: m + 1], max(self.digits, other.digits)
        return None

    def __add__(self, other):
        p = self._pair(other)
        if p is None:
            with working_precision(self.digits):
                return TruncatedSeries(self.center, (self.coeffs[0] + other,) + self.coeffs[1:], self.digits)
        a, b, dg = p
        with working_precision(dg):
            return TruncatedSeries(self.center, tuple(map(gmpy2.add, a, b)), dg)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.center, tuple(-c for c in self.coeffs), self.digits)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._pair(other)
        if p is None:
            with working_precision(self.digits):
                s = big(other)
                return TruncatedSeries(self.center, tuple(c * s for c in self.coeffs), self.digits)
        a, b, dg = p
        with working_precision(dg):
            return TruncatedSeries(self.center, tuple(convolve(a, b, len(a) - 1)), dg)

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncatedSeries":
        with working_precision(self.digits):
            a = self.coeffs
            if a[0] == 0:
                raise ZeroDivisionError("series division needs a nonzero constant term")
            inv0 = 1 / a[0]
            out = [inv0]
            for j in range(1, len(a)):
                acc = gmpy2.fsum(map(gmpy2.mul, a[1 : j + 1], out[::-1]))
                out.append(-acc * inv0)
            return TruncatedSeries(self.center, tuple(out), self.digits)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        with working_precision(self.digits):
            return self * (1 / big(other))

    def derivative(self) -> "TruncatedSeries":
        """Exact derivative; the order drops by one."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 series")
        with working_precision(self.digits):
            d = tuple(self.coeffs[j] * j for j in range(1, len(self.coeffs)))
        return TruncatedSeries(self.center, d, self.digits)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.center, self.coeffs[: order + 1], self.digits)

    def __call__(self, r):
        with working_precision(self.digits):
            t = big(r) - self.center
            acc = mpfr(0)
            for c in reversed(self.coeffs):
                acc = acc * t + c
            return acc


def convolve(a: Sequence, b: Sequence, order: int) -> list:
    """Cauchy product of two coefficient lists, truncated at ``order``.

    Runs at the caller's active precision; each coefficient is an exactly
    rounded sum.
    """
    fsum, mul = gmpy2.fsum, gmpy2.mul
    return [fsum(map(mul, a[: j + 1], b[j::-1])) for j in range(order + 1)]


def _taylor_shift(poly: list, c) -> list:
    # Horner-style repeated synthetic division: coefficients in powers of (r - c).
    out = list(poly)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + c * out[j + 1]
    return out


def series_from_rational(numer_poly_coeffs: Sequence, denom_linear_roots: Iterable,
                         center, order: int, digits: int = DEFAULT_DIGITS) -> TruncatedSeries:
    """Taylor expansion of ``P(r) / prod_i (r - rho_i)**m_i`` about ``center``.

    ``numer_poly_coeffs[i]`` multiplies ``r**i``; ``denom_linear_roots`` is an
    iterable of ``(rho, m)`` pairs.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    with working_precision(digits):
        c = big(center)
        result = TruncatedSeries.from_polynomial(numer_poly_coeffs or [0], c, order, digits)
        for rho, mult in denom_linear_roots:
            gap = c - big(rho)
            if gap == 0:
                raise PoleAtCenterError(f"expansion point {c} is a pole of the rational function")
            # 1/(r - rho) = 1/(gap + t) = sum_j (-1)^j t^j / gap^(j+1)
            inv = 1 / gap
            geo = [inv]
            for _ in range(order):
                geo.append(-geo[-1] * inv)
            factor = TruncatedSeries(c, tuple(geo), digits)
            for _ in range(int(mult)):
                result = result * factor
        return result


@dataclass(frozen=True)
class Bracket:
    lo: BigReal
    hi: BigReal

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo


def _checked(f, x):
    y = f(x)
    if not is_finite(y):
        raise EvaluationError(f"non-finite function value {y} at {x}")
    return y


def _sign(y) -> int:
    return (y > 0) - (y < 0)


def find_root(f: Callable, bracket: Bracket, tol, digits: int = DEFAULT_DIGITS,
              coarse_steps: int = 6, max_iter: int = 400) -> BigReal:
    """Root of ``f`` inside a sign-changing ``bracket``.

    A few bisections shrink the bracket, then secant steps refine the root.
    Any secant step that leaves the current bracket or fails to shrink it is
    replaced by a bisection.  The returned point sits inside a sign-change
    interval narrower than ``tol``.
    """
    with working_precision(digits):
        lo, hi = big(bracket.lo), big(bracket.hi)
        tol = big(tol)
        flo, fhi = _checked(f, lo), _checked(f, hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        slo = _sign(flo)
        if slo == _sign(fhi):
            raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")

        for _ in range(coarse_steps):
            if hi - lo < tol:
                break
            mid = (lo + hi) / 2
            fm = _checked(f, mid)
            if fm == 0:
                return mid
            if _sign(fm) == slo:
                lo, flo = mid, fm
            else:
                hi, fhi = mid, fm

        x0, f0, x1, f1 = lo, flo, hi, fhi
        stalls = 0
        for _ in range(max_iter):
            if hi - lo < tol:
                break
            width = hi - lo
            x = None
            if f1 != f0 and stalls < 4:
                x = x1 - f1 * (x1 - x0) / (f1 - f0)
            if x is None or not (lo < x < hi):
                x = (lo + hi) / 2
                stalls = 0
            elif abs(x - x1) < tol / 2:
                # Step past the estimate so the bracket closes around the root.
                x = x1 + (tol / 2 if hi - x1 > x1 - lo else -tol / 2)
                x = min(max(x, lo + tol / 4), hi - tol / 4)
            fx = _checked(f, x)
            if fx == 0:
                return x
            if _sign(fx) == slo:
                lo, flo = x, fx
            else:
                hi, fhi = x, fx
            x0, f0, x1, f1 = x1, f1, x, fx
            stalls = stalls + 1 if hi - lo > width / 2 else 0
        else:
            raise EvaluationError("find_root exceeded max_iter")
        return lo if abs(flo) <= abs(fhi) else hi


def minimize_unimodal(f: Callable, bracket: Bracket, tol, digits: int = DEFAULT_DIGITS,
                      dfdx: Callable | None = None, coarse_width=None):
    """Minimize a unimodal ``f`` on ``bracket``; returns ``(argmin, f(argmin))``.

    Golden-section search narrows the bracket; when the derivative ``dfdx``
    is supplied the minimizer is then polished by solving ``dfdx = 0`` with
    :func:`find_root`.  A function that is monotone across the whole bracket
    raises :class:`NotUnimodalError`.
    """
    with working_precision(digits):
        a, b = big(bracket.lo), big(bracket.hi)
        tol = big(tol)
        if dfdx is not None:
            da, db = dfdx(a), dfdx(b)
            if da >= 0 and db >= 0 or da <= 0 and db <= 0:
                raise NotUnimodalError(f"derivative has one sign on [{a}, {b}]")
        else:
            eps = min(tol, (b - a) / 1000)
            up_left = f(a + eps) > f(a)
            up_right = f(b) > f(b - eps)
            if up_left == up_right:
                raise NotUnimodalError(f"function is monotone on [{a}, {b}]")

        target = tol if dfdx is None else (big(coarse_width) if coarse_width is not None
                                            else max(tol, (b - a) * big("1e-6")))
        g = big(_INV_PHI)
        c = b - g * (b - a)
        d = a + g * (b - a)
        fc, fd = f(c), f(d)
        while b - a > target:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - g * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + g * (b - a)
                fd = f(d)
        if dfdx is None:
            x = (a + b) / 2
            return x, f(x)
        if _sign(dfdx(a)) == _sign(dfdx(b)):
            # Golden section already collapsed onto the minimizer.
            x = (a + b) / 2
            return x, f(x)
        x = find_root(dfdx, Bracket(a, b), tol, digits)
        return x, f(x)
