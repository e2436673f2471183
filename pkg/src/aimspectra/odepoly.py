"""Polynomial solutions of second-order ODEs with polynomial coefficients.

Three classes are handled:

* cubic/quadratic/linear coefficients (``OdeClass1418``)::

    (a30 r^3 + a31 r^2 + a32 r + a33) y'' + (a20 r^2 + a21 r + a22) y' - (t10 r + t11) y = 0

* quadratic/linear/constant coefficients, whose polynomial solutions obey a
  three-term recurrence (:func:`poly_sequence_18`), and
* quartic/cubic/quadratic coefficients (``OdeClass54``)::

    (a40 r^4 + ... + a44) y'' + (a30 r^3 + ... + a33) y' - (t20 r^2 + t21 r + t22) y = 0

A degree-n polynomial solution requires the leading ``tau`` to take a fixed
value (the necessary condition) plus the vanishing of determinants built
from the remaining coefficients (the sufficient condition).

Polynomials are coefficient lists in ascending powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DegenerateParameterError, DegreeDegenerateError, DimensionError
from .numerics import DEFAULT_DIGITS, big, working_precision


@dataclass(frozen=True)
class OdeClass1418:
    a3: tuple  # (a30, a31, a32, a33)
    a2: tuple  # (a20, a21, a22)
    tau: tuple  # (t10, t11)

    def with_tau(self, tau) -> "OdeClass1418":
        return OdeClass1418(self.a3, self.a2, tuple(tau))


@dataclass(frozen=True)
class OdeClass54:
    a4: tuple  # (a40, ..., a44)
    a3: tuple  # (a30, ..., a33)
    tau: tuple  # (t20, t21, t22)

    def with_tau(self, tau) -> "OdeClass54":
        return OdeClass54(self.a4, self.a3, tuple(tau))


@dataclass(frozen=True)
class BandEntries:
    """Entries of a banded determinant, indexed as in the theory.

    Row i holds ``gamma[i]`` (column i-1), ``beta[i]`` (diagonal),
    ``alpha[i+1]`` (column i+1) and ``eta[i+1]`` (column i+2).  Index 0 of
    ``alpha``, ``gamma`` and ``eta`` is never read.
    """

    beta: Sequence
    alpha: Sequence
    gamma: Sequence
    eta: Sequence | None = None

    @property
    def tridiagonal(self) -> bool:
        return self.eta is None or all(e == 0 for e in self.eta[1:])


def necessary_tau_14(n: int, a30, a20, digits: int = DEFAULT_DIGITS):
    """Value of t10 for which a degree-n polynomial solution can exist."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    with working_precision(digits):
        return n * (n - 1) * big(a30) + n * big(a20)


def necessary_tau_54(n: int, a40, a30, digits: int = DEFAULT_DIGITS):
    """Value of t20 for which a degree-n polynomial solution can exist."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    with working_precision(digits):
        return n * (n - 1) * big(a40) + n * big(a30)


def band_entries_14(ode: OdeClass1418, n: int, digits: int = DEFAULT_DIGITS) -> BandEntries:
    """Determinant entries for degree n, with t10 frozen at its given value."""
    with working_precision(digits):
        a30, a31, a32, a33 = map(big, ode.a3)
        a20, a21, a22 = map(big, ode.a2)
        t10, t11 = map(big, ode.tau)
        idx = range(n + 1)
        beta = [t11 - i * ((i - 1) * a31 + a21) for i in idx]
        alpha = [-i * ((i - 1) * a32 + a22) for i in idx]
        gamma = [t10 - (i - 1) * ((i - 2) * a30 + a20) for i in idx]
        eta = [-i * (i + 1) * a33 for i in idx]
        return BandEntries(beta, alpha, gamma, eta)


def band_determinant(entries: BandEntries, size: int, digits: int = DEFAULT_DIGITS):
    """Determinant of the leading ``size`` x ``size`` block.

    Tridiagonal input uses the continuant recurrence
    ``D_i = beta_{i-1} D_{i-1} - gamma_{i-1} alpha_{i-1} D_{i-2}``; a nonzero
    second superdiagonal falls back to Gaussian elimination.
    """
    if size < 1:
        raise DimensionError("size must be >= 1")
    need = {"beta": size, "alpha": size, "gamma": size}
    if len(entries.beta) < need["beta"] or (size > 1 and (
            len(entries.alpha) < size or len(entries.gamma) < size)):
        raise DimensionError(f"band entries do not cover a {size}x{size} determinant")
    with working_precision(digits):
        if entries.tridiagonal:
            d_prev2, d_prev = big(0), big(1)
            for i in range(1, size + 1):
                d = big(entries.beta[i - 1]) * d_prev
                if i >= 2:
                    d -= big(entries.gamma[i - 1]) * big(entries.alpha[i - 1]) * d_prev2
                d_prev2, d_prev = d_prev, d
            return d_prev
        if size > 2 and len(entries.eta) < size - 1:
            raise DimensionError(f"eta entries do not cover a {size}x{size} determinant")
        return det_gauss(band_matrix(entries, size))


def band_matrix(entries: BandEntries, size: int) -> list:
    m = [[big(0)] * size for _ in range(size)]
    for i in range(size):
        m[i][i] = big(entries.beta[i])
        if i + 1 < size:
            m[i][i + 1] = big(entries.alpha[i + 1])
        if i >= 1:
            m[i][i - 1] = big(entries.gamma[i])
        if i + 2 < size and entries.eta is not None:
            m[i][i + 2] = big(entries.eta[i + 1])
    return m


def det_gauss(m: list):
    """Determinant by Gaussian elimination with partial pivoting (active precision)."""
    a = [list(row) for row in m]
    n = len(a)
    det = big(1)
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(a[r][c]))
        if a[p][c] == 0:
            return big(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for j in range(c, n):
                    a[r][j] -= f * a[c][j]
    return det


def _solve(m: list, rhs: list) -> list:
    # Gaussian elimination; raises on a singular system.
    n = len(m)
    a = [list(row) + [v] for row, v in zip(m, rhs)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(a[r][c]))
        if a[p][c] == 0:
            raise DegenerateParameterError("coefficient recurrence is singular")
        a[c], a[p] = a[p], a[c]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c] / a[c][c]
                for j in range(c, n + 1):
                    a[r][j] -= f * a[c][j]
    return [a[i][n] / a[i][i] for i in range(n)]


def _recurrence_rows_14(ode: OdeClass1418, n: int):
    """Equation i (coefficient of r^i) as {offset: weight} acting on c_{i+offset}."""
    a30, a31, a32, a33 = map(big, ode.a3)
    a20, a21, a22 = map(big, ode.a2)
    t10, t11 = map(big, ode.tau)
    rows = []
    for i in range(n + 2):
        rows.append({
            2: (i + 2) * (i + 1) * a33,
            1: i * (i + 1) * a32 + (i + 1) * a22,
            0: i * (i - 1) * a31 + i * a21 - t11,
            -1: (i - 1) * (i - 2) * a30 + (i - 1) * a20 - t10,
        })
    return rows


def _recurrence_rows_54(ode: OdeClass54, n: int):
    a40, a41, a42, a43, a44 = map(big, ode.a4)
    a30, a31, a32, a33 = map(big, ode.a3)
    t20, t21, t22 = map(big, ode.tau)
    rows = []
    for i in range(n + 3):
        rows.append({
            2: (i + 2) * (i + 1) * a44,
            1: i * (i + 1) * a43 + (i + 1) * a33,
            0: i * (i - 1) * a42 + i * a32 - t22,
            -1: (i - 1) * (i - 2) * a41 + (i - 1) * a31 - t21,
            -2: (i - 2) * (i - 3) * a40 + (i - 2) * a30 - t20,
        })
    return rows


def _solve_recurrence(rows, n: int) -> list:
    """c_0 = 1 and c_1..c_n from equations 0..n-1 with c_j = 0 for j > n."""
    if n == 0:
        return [big(1)]
    if all(rows[i][2] == 0 for i in range(n)):
        # Leading term of equation i is c_{i+1}: solve forward.
        c = [big(1)]
        for i in range(n):
            lead = rows[i][1]
            if lead == 0:
                raise DegenerateParameterError(f"recurrence denominator vanishes at i={i}")
            acc = sum((w * c[i + o] for o, w in rows[i].items() if o <= 0 and i + o >= 0), big(0))
            c.append(-acc / lead)
        return c
    m = [[big(0)] * n for _ in range(n)]
    rhs = [big(0)] * n
    for i in range(n):
        for o, w in rows[i].items():
            j = i + o
            if j == 0:
                rhs[i] -= w
            elif 1 <= j <= n:
                m[i][j - 1] += w
    return [big(1)] + _solve(m, rhs)


def _closure(rows, c, eqs) -> list:
    n = len(c) - 1
    out = []
    for i in eqs:
        acc = big(0)
        for o, w in rows[i].items():
            j = i + o
            if 0 <= j <= n:
                acc += w * c[j]
        out.append(acc)
    return out


def poly_coeffs_14(ode: OdeClass1418, n: int, digits: int = DEFAULT_DIGITS) -> list:
    """Coefficients (c_0 = 1, ..., c_n) of the degree-n polynomial solution."""
    with working_precision(digits):
        c = _solve_recurrence(_recurrence_rows_14(ode, n), n)
        if c[-1] == 0 and n > 0:
            raise DegreeDegenerateError(f"recurrence forces c_{n} = 0")
        return c


def poly_coeffs_54(ode: OdeClass54, n: int, digits: int = DEFAULT_DIGITS) -> list:
    """Coefficients (c_0 = 1, ..., c_n) from the five-term recurrence."""
    with working_precision(digits):
        c = _solve_recurrence(_recurrence_rows_54(ode, n), n)
        if c[-1] == 0 and n > 0:
            raise DegreeDegenerateError(f"recurrence forces c_{n} = 0")
        return c


def sufficiency_residuals_54(ode: OdeClass54, n: int, digits: int = DEFAULT_DIGITS):
    """The two closure residuals whose joint vanishing gives a degree-n solution.

    After solving equations 0..n-1 of the five-term recurrence for
    c_1..c_n, equations n and n+1 must also hold with c_{n+1} = c_{n+2} = 0.
    For n = 1, 2 these residuals are the two 2x2 / 3x3 determinants divided
    by the (common) determinant of the solved block.
    """
    with working_precision(digits):
        rows = _recurrence_rows_54(ode, n)
        c = _solve_recurrence(rows, n)
        r1, r2 = _closure(rows, c, (n, n + 1))
        return r1, r2


def explicit_determinants_54(ode: OdeClass54, n: int, digits: int = DEFAULT_DIGITS):
    """The printed determinant pair for n = 0, 1, 2 (n = 0 gives (-t22, -t21))."""
    with working_precision(digits):
        a40, a41, a42, a43, a44 = map(big, ode.a4)
        a30, a31, a32, a33 = map(big, ode.a3)
        t20, t21, t22 = map(big, ode.tau)
        if n == 0:
            return -t22, -t21
        if n == 1:
            d1 = det_gauss([[-t22, a33], [-t21, a32 - t22]])
            d2 = det_gauss([[-t22, a33], [-a30, a31 - t21]])
            return d1, d2
        if n == 2:
            top = [[-t22, a33, 2 * a44], [-t21, a32 - t22, 2 * a43 + 2 * a33]]
            d1 = det_gauss(top + [[-2 * a40 - 2 * a30, a31 - t21, 2 * a42 + 2 * a32 - t22]])
            d2 = det_gauss(top + [[big(0), -2 * a40 - a30, 2 * a41 + 2 * a31 - t21]])
            return d1, d2
        raise ValueError("explicit determinants are only printed for n <= 2")


def poly_sequence_18(a2: Sequence, a1: Sequence, digits: int = DEFAULT_DIGITS) -> Iterator[list]:
    """Polynomial solutions y_0, y_1, ... of

        (a20 r^2 + a21 r + a22) y'' + (a10 r + a11) y' - t00 y = 0,  t00 = n(n-1) a20 + n a10

    generated by ``y_{n+2} = (A_n x + B_n) y_{n+1} + C_n y_n``.
    """
    with working_precision(digits):
        a20, a21, a22 = map(big, a2)
        a10, a11 = map(big, a1)
    if a20 == 0 and a10 == 0:
        raise DegenerateParameterError("a20 and a10 cannot both vanish")
    with working_precision(digits):
        y_prev, y = [big(1)], [a11, a10]
    yield y_prev
    yield y
    n = 0
    while True:
        with working_precision(digits):
            d1 = n * a20 + a10
            d2 = 2 * n * a20 + a10
            if d1 == 0 or d2 == 0:
                raise DegenerateParameterError(f"three-term recurrence denominator vanishes at n={n}")
            p = (2 * n + 1) * a20 + a10
            q = 2 * (n + 1) * a20 + a10
            A = p * q / d1
            B = p * (2 * n * (n + 1) * a20 * a21 + 2 * (n + 1) * a10 * a21
                     - 2 * a11 * a20 + a10 * a11) / (d1 * d2)
            C = (n + 1) * q * ((4 * a22 * a20 ** 2 - a20 * a21 ** 2) * n ** 2
                               + (4 * a20 * a10 * a22 - a10 * a21 ** 2) * n
                               + a10 ** 2 * a22 - a11 * a10 * a21 + a20 * a11 ** 2) / (d1 * d2)
            nxt = [big(0)] * (len(y) + 1)
            for i, c in enumerate(y):
                nxt[i] += B * c
                nxt[i + 1] += A * c
            for i, c in enumerate(y_prev):
                nxt[i] += C * c
        y_prev, y = y, nxt
        n += 1
        yield y


# residuals ------------------------------------------------------------------

def poly_mul(p: Sequence, q: Sequence) -> list:
    out = [big(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def poly_add(*polys) -> list:
    n = max(len(p) for p in polys)
    out = [big(0)] * n
    for p in polys:
        for i, x in enumerate(p):
            out[i] += x
    return out


def poly_deriv(p: Sequence) -> list:
    return [i * p[i] for i in range(1, len(p))] or [big(0)]


def poly_eval(p: Sequence, x):
    acc = big(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def ode_residual(second: Sequence, first: Sequence, zeroth: Sequence, y: Sequence,
                 digits: int = DEFAULT_DIGITS) -> list:
    """Coefficients of ``second*y'' + first*y' + zeroth*y`` (all ascending lists)."""
    with working_precision(digits):
        y = [big(c) for c in y]
        d1 = poly_deriv(y)
        d2 = poly_deriv(d1)
        return poly_add(poly_mul([big(c) for c in second], d2),
                        poly_mul([big(c) for c in first], d1),
                        poly_mul([big(c) for c in zeroth], y))


def residual_14(ode: OdeClass1418, y: Sequence, digits: int = DEFAULT_DIGITS) -> list:
    with working_precision(digits):
        second = list(reversed([big(c) for c in ode.a3]))
        first = list(reversed([big(c) for c in ode.a2]))
        t10, t11 = map(big, ode.tau)
        return ode_residual(second, first, [-t11, -t10], y, digits)


def residual_54(ode: OdeClass54, y: Sequence, digits: int = DEFAULT_DIGITS) -> list:
    with working_precision(digits):
        second = list(reversed([big(c) for c in ode.a4]))
        first = list(reversed([big(c) for c in ode.a3]))
        t20, t21, t22 = map(big, ode.tau)
        return ode_residual(second, first, [-t22, -t21, -t20], y, digits)


def residual_18(a2: Sequence, a1: Sequence, n: int, y: Sequence, digits: int = DEFAULT_DIGITS) -> list:
    with working_precision(digits):
        a20, a21, a22 = map(big, a2)
        a10, a11 = map(big, a1)
        t00 = n * (n - 1) * a20 + n * a10
        return ode_residual([a22, a21, a20], [a11, a10], [-t00], y, digits)
