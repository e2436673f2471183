from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aimspectra.bounds import (
    QuantumNumbers,
    bound_triple,
    envelope_bounds,
    fig1_curve,
    sum_approximation,
    uncertainty_lower_bound,
)
from aimspectra.errors import UnboundedBelowError, UnsupportedParameterError
from aimspectra.numerics import big, working_precision
from aimspectra.problem import ProblemSpec

QN0 = QuantumNumbers(0, 0, 3)
quantum = st.builds(QuantumNumbers, st.integers(0, 4), st.integers(0, 4), st.integers(2, 7))
couplings = st.fractions(min_value=Fraction(-3), max_value=Fraction(3), max_denominator=8)
strengths = st.fractions(min_value=Fraction(1, 16), max_value=Fraction(4), max_denominator=16)


def near(x, y, tol="1e-40"):
    with working_precision(60):
        return abs(big(x) - big(y)) <= big(tol)


def test_quantum_numbers():
    qn = QuantumNumbers(2, 1, 3)
    assert qn.P1 == qn.nu == 4 and qn.P2 == Fraction(13, 2)
    with pytest.raises(UnsupportedParameterError):
        QuantumNumbers(0, 0, 1)


@given(quantum)
def test_p_ordering(qn):
    assert qn.P2 >= qn.P1 >= Fraction(qn.d - 1, 2) > 0


def test_envelope_values_ground_d3():
    lower, upper = envelope_bounds(QN0, 1, "1/2")
    assert near(lower, "-0.165250185892402263937164707370082023217970403040039353052744", "1e-50")
    assert near(upper, "0.619258677639202505580496180697303420237444246123518757290013", "1e-50")


def test_envelope_at_zero_coupling_is_oscillator():
    lower, upper = envelope_bounds(QuantumNumbers(1, 2, 3), 0, "1/2")
    assert near(lower, 4) and near(upper, Fraction(11, 2))


def test_lower_envelope_coulomb_limit():
    lower, _ = envelope_bounds(QN0, 1, "1e-6")
    assert abs(lower + big("0.5")) < big("1e-3")


def test_sum_approximation_oscillator_exact():
    assert near(sum_approximation(QN0, 0, "1/2"), "1.5")


def test_sum_approximation_coulomb_probe():
    value = sum_approximation(QN0, 1, "1e-12")
    assert abs(value + big("0.5")) < big("1e-6")


@given(quantum, strengths)
def test_sum_approximation_exact_without_coulomb(qn, b):
    with working_precision(60):
        exact = big(qn.P2) * gmpy2.sqrt(2 * big(b))
    assert near(sum_approximation(qn, 0, b), exact, "1e-45")


@given(quantum, st.fractions(min_value=Fraction(1, 8), max_value=3, max_denominator=8), strengths)
def test_triple_is_ordered_for_positive_coupling(qn, a, b):
    t = bound_triple(qn, a, b, 40)
    assert t.lower <= t.estimate <= t.upper


@given(quantum, couplings, strengths)
def test_estimates_monotone_in_parameters(qn, a, b):
    step = Fraction(1, 10)
    base = bound_triple(qn, a, b, 40)
    more_a = bound_triple(qn, a + step, b, 40)
    more_b = bound_triple(qn, a, b + step, 40)
    for name in ("lower", "estimate", "upper"):
        assert getattr(more_a, name) < getattr(base, name)
        assert getattr(more_b, name) > getattr(base, name)


def test_uncertainty_bound_oscillator():
    assert near(uncertainty_lower_bound(ProblemSpec(0, "1/2", d=3)), "0.5")


def test_uncertainty_bound_below_ground_state():
    assert uncertainty_lower_bound(ProblemSpec(1, "1/2", d=3)) < big("0.179668484653553873")


def test_uncertainty_bound_box_endpoint():
    # d = 4, a = 1, b = 1/2: F(r) = 1/(2r^2) - 1/r + r^2/2 is stationary at r^4 + r = 1, r* ~ 0.724
    inside = uncertainty_lower_bound(ProblemSpec(1, "1/2", d=4, R=1))
    assert near(inside, "-0.1652501858924022639371647073700820232179704030400393530527", "1e-50")
    # with R = 1/2 the minimum over (0, R] sits on the wall
    assert near(uncertainty_lower_bound(ProblemSpec(1, "1/2", d=4, R="0.5")), Fraction(1, 8))


def test_uncertainty_bound_two_dimensions():
    with pytest.raises(UnboundedBelowError):
        uncertainty_lower_bound(ProblemSpec(1, "1/2", d=2))
    assert uncertainty_lower_bound(ProblemSpec(0, "1/2", d=2)) == 0
    with working_precision(60):
        expect = 3 * gmpy2.cbrt(big(1) / 4) * gmpy2.cbrt(big("0.5"))  # |a|/r + b r^2 at r^3 = |a|/(2b)
    assert near(uncertainty_lower_bound(ProblemSpec(-1, "1/2", d=2)), expect, "1e-50")


def test_fig1_grid_shape_and_consistency():
    rows = fig1_curve(1, "1/2", 3, [0, 1, 2], 10)
    assert len(rows) == 33
    assert rows[0][2] == sum_approximation(QN0, 1, "1/2")
    for n in range(3):
        curve = [E for m, _, E in rows if m == n]
        assert all(x < y for x, y in zip(curve, curve[1:]))


def test_fig1_oscillator_ladder():
    rows = fig1_curve(0, "1/2", 3, [0, 1], 2)
    assert all(near(E, 2 * n + l + Fraction(3, 2), "1e-45") for n, l, E in rows)
