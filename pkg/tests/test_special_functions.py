import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caputo_density.special_functions import FractionalOrder, beta, gamma, reflection


def test_gamma_integers():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_half_against_high_precision():
    # independent oracle: 50-digit arithmetic
    exact = float(mpmath.mp.mpf(mpmath.mp.sqrt(mpmath.mp.pi)))
    assert gamma(0.5) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("z", np.geomspace(0.05, 50.0, 37))
def test_gamma_grid_against_mpmath(z):
    with mpmath.workdps(40):
        exact = float(mpmath.gamma(z))
    assert gamma(float(z)) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("z", [0.0, -1.0, -0.5])
def test_gamma_rejects_nonpositive(z):
    with pytest.raises(ValueError):
        gamma(z)


def test_beta_examples():
    assert beta(1.0, 0.5) == pytest.approx(2.0, rel=1e-13)  # beta(1, s) = 1/s
    assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-13)
    assert beta(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-13)


def test_beta_rejects_nonpositive():
    with pytest.raises(ValueError):
        beta(-1.0, 2.0)
    with pytest.raises(ValueError):
        beta(1.0, 0.0)


def test_reflection_identity_grid():
    for s in np.linspace(0.05, 0.95, 91):
        target = math.pi / math.sin(math.pi * s)
        assert abs(beta(s, 1.0 - s) - target) <= 1e-10 * abs(target)
        assert reflection(s) == pytest.approx(target, rel=1e-15)


@given(st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=200)
def test_gamma_recurrence(z):
    assert abs(gamma(z + 1.0) - z * gamma(z)) <= 1e-12 * gamma(z + 1.0)


@given(st.floats(min_value=0.05, max_value=20.0), st.floats(min_value=0.05, max_value=20.0))
@settings(max_examples=200)
def test_beta_symmetry(x, y):
    assert abs(beta(x, y) - beta(y, x)) <= 1e-12 * abs(beta(x, y))


@pytest.mark.parametrize("s", [0.0, 1.0, -0.2, 1.3])
def test_fractional_order_rejects_outside_unit_interval(s):
    with pytest.raises(ValueError):
        FractionalOrder(s)


def test_fractional_order_coercion():
    order = FractionalOrder.of(0.25)
    assert FractionalOrder.of(order) is order
    assert order.sin_factor == pytest.approx(math.sin(math.pi * 0.25) / math.pi, rel=1e-15)
