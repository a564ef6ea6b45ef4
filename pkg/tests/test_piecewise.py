import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caputo_density.piecewise import PiecewisePoly, stable_power_difference


def quad_bump():
    return PiecewisePoly([0.0, 0.75, 1.0], [[1.0, -8.0 / 3.0, 16.0 / 9.0], [0.0]], left_tail=1.0)


def test_value_and_left_tail():
    p = quad_bump()
    assert p.value(-3.0) == 1.0
    assert p.value(0.0) == pytest.approx(1.0, abs=1e-15)
    assert p.value(0.5) == pytest.approx((16.0 / 9.0) * 0.0625, rel=1e-14)
    assert p.value(0.9) == 0.0
    xs = np.array([-1.0, 0.25, 0.8, 1.0])
    np.testing.assert_allclose(p.value(xs), [1.0, (16 / 9) * 0.25, 0.0, 0.0], atol=1e-15)


def test_value_rejects_beyond_last_breakpoint():
    with pytest.raises(ValueError):
        quad_bump().value(1.5)


def test_derivative_uses_right_piece_at_breakpoints():
    p = quad_bump()
    assert p.derivative_value(0.75) == 0.0  # right piece is identically zero
    assert p.derivative_value(0.0) == pytest.approx(-8.0 / 3.0, rel=1e-14)
    assert p.derivative_value(-0.5) == 0.0  # constant tail


def test_discontinuous_construction_rejected():
    with pytest.raises(ValueError, match="discontinuity"):
        PiecewisePoly([0.0, 0.5, 1.0], [[0.0, 1.0], [7.0]])


def test_left_tail_mismatch_rejected():
    with pytest.raises(ValueError, match="left tail"):
        PiecewisePoly([0.0, 1.0], [[1.0, 1.0]], left_tail=0.0)


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        PiecewisePoly([0.0, 0.0, 1.0], [[1.0], [1.0]])


def test_degree_cap():
    with pytest.raises(ValueError):
        PiecewisePoly([0.0, 1.0], [[0.0, 0.0, 0.0, 0.0, 1.0]])


coeff = st.floats(min_value=-3.0, max_value=3.0)


@given(st.lists(coeff, min_size=2, max_size=4), st.lists(coeff, min_size=2, max_size=4),
       st.floats(min_value=-2.0, max_value=2.0))
@settings(max_examples=100)
def test_linear_combination_evaluates_pointwise(c1, c2, alpha):
    p = PiecewisePoly.single(c1, 0.0, 1.0)
    q = PiecewisePoly.single(c2, 0.0, 1.0)
    combo = p + alpha * q
    xs = np.linspace(0.0, 1.0, 17)
    np.testing.assert_allclose(
        combo.value(xs), p.value(xs) + alpha * q.value(xs), atol=1e-12
    )
    np.testing.assert_allclose(
        combo.derivative_value(xs),
        p.derivative_value(xs) + alpha * q.derivative_value(xs),
        atol=1e-12,
    )


def test_addition_merges_breakpoints():
    p = quad_bump()
    q = PiecewisePoly([0.0, 0.5, 1.0], [[0.0, 1.0], [0.5]], left_tail=0.0)
    combo = p + q
    assert set(np.round(combo.breakpoints, 12)) == {0.0, 0.5, 0.75, 1.0}
    xs = np.linspace(-0.5, 1.0, 31)
    np.testing.assert_allclose(combo.value(xs), p.value(xs) + q.value(xs), atol=1e-12)


@given(st.floats(min_value=1e-12, max_value=10.0), st.floats(min_value=0.0, max_value=0.99),
       st.floats(min_value=0.05, max_value=4.0))
@settings(max_examples=200)
def test_stable_power_difference(hi, frac, p):
    lo = hi * frac
    exact = hi**p - lo**p
    assert stable_power_difference(hi, lo, p) == pytest.approx(exact, rel=1e-12, abs=1e-300)
