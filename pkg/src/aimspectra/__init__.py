"""Spectra of the d-dimensional -a/r + b r^2 radial problem, free and confined."""

from .aim import EigenvalueResult, eigenvalue, spectrum
from .bounds import (BoundTriple, QuantumNumbers, bound_triple, envelope_bounds, fig1_curve,
                     sum_approximation, uncertainty_lower_bound)
from .exact import RadialSolution, confined_solution, free_solution
from .numerics import DEFAULT_DIGITS, Bracket, TruncatedSeries, find_root, minimize_unimodal
from .oracle import GridSpec, fd_eigenvalues
from .problem import ProblemSpec

__all__ = [
    "DEFAULT_DIGITS",
    "BoundTriple",
    "Bracket",
    "EigenvalueResult",
    "GridSpec",
    "ProblemSpec",
    "QuantumNumbers",
    "RadialSolution",
    "TruncatedSeries",
    "bound_triple",
    "confined_solution",
    "eigenvalue",
    "envelope_bounds",
    "fd_eigenvalues",
    "fig1_curve",
    "find_root",
    "free_solution",
    "minimize_unimodal",
    "spectrum",
    "sum_approximation",
    "uncertainty_lower_bound",
]
