"""Problem definition shared by the solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

from .errors import UnsupportedParameterError

Number = Union[int, float, str, Fraction, object]


@dataclass(frozen=True)
class ProblemSpec:
    """Radial problem for V(r) = -a/r + b r^2 in d dimensions with angular momentum l.

    ``R`` is the hard-wall radius, or ``None`` for the free (unbounded) problem.
    Parameters are kept as given (ints, floats, decimal strings, Fractions or
    mpfr) and converted at the working precision of each computation, so
    ``"0.5"`` and ``Fraction(1, 2)`` stay exact at any number of digits.
    """

    a: Number
    b: Number
    d: int = 3
    l: int = 0
    R: Number | None = None

    def __post_init__(self):
        if _float(self.b) <= 0:
            raise UnsupportedParameterError(f"b must be > 0 (got {self.b}); pure Coulomb is not supported")
        if int(self.d) != self.d or self.d < 2:
            raise UnsupportedParameterError(f"dimension d must be an integer >= 2 (got {self.d})")
        if int(self.l) != self.l or self.l < 0:
            raise UnsupportedParameterError(f"angular momentum l must be an integer >= 0 (got {self.l})")
        if self.R is not None and _float(self.R) <= 0:
            raise UnsupportedParameterError(f"box radius R must be > 0 (got {self.R})")

    @property
    def k(self) -> int:
        return self.d + 2 * self.l

    @property
    def bounded(self) -> bool:
        return self.R is not None

    def with_(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)

    def label(self) -> str:
        box = "inf" if self.R is None else str(self.R)
        return f"a={self.a} b={self.b} d={self.d} l={self.l} R={box}"


def _float(x) -> float:
    if isinstance(x, str):
        return float(Fraction(x)) if "/" in x else float(x)
    return float(x)


def parse_radius(text: str):
    """``'inf'`` (any case) gives ``None``; anything else is kept as a decimal string."""
    if text is None or str(text).strip().lower() in {"inf", "infinity", "none", "∞"}:
        return None
    value = float(text)
    if not math.isfinite(value):
        return None
    return str(text)
