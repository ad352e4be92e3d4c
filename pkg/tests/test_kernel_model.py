import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from intdelay.errors import (
    BoundOrderViolation,
    HorizonMismatch,
    IndexOutOfRange,
    NonPositiveStep,
    NonVanishingTail,
    ShapeMismatch,
    ValidationError,
    ZeroKnots,
)
from intdelay.kernel_model import (
    ConcreteSplineKernel,
    eval_basis,
    eval_bound,
    integrate_basis,
    validate,
)

from conftest import spline_bounds


def _raw(**over):
    raw = {"n": 1, "n0": 1, "h": 0.5, "N": 2, "b_upper": [[[-30, 30]]], "b_lower": [[[-30, 30]]]}
    raw.update(over)
    return raw


def test_hat_description_is_valid(hat):
    assert (hat.n, hat.n0, hat.h, hat.N) == (1, 1, 0.5, 2)
    assert hat.tau_bar == 1.0


def test_band_demo_description_is_valid(demo):
    assert demo.b_upper.shape == (2, 2, 2)
    np.testing.assert_allclose(demo.b_upper - demo.b_lower, 0.2)


def test_bound_order_violation():
    with pytest.raises(BoundOrderViolation):
        validate({"n": 1, "n0": 0, "h": 1.0, "N": 1, "b_upper": [[[1.0]]], "b_lower": [[[2.0]]]})


@pytest.mark.parametrize(
    "over, exc",
    [
        ({"h": 0.0}, NonPositiveStep),
        ({"h": -1.0}, NonPositiveStep),
        ({"N": 0, "b_upper": [[[]]], "b_lower": [[[]]]}, ZeroKnots),
        ({"b_upper": [[[-30, 30, 1]]]}, ShapeMismatch),
        ({"tau_bar": 1.5}, HorizonMismatch),
        ({"n0": 1.5}, ValidationError),
        ({"b_lower": [[[-30, float("nan")]]]}, ValidationError),
    ],
)
def test_invalid_descriptions(over, exc):
    with pytest.raises(exc):
        validate(_raw(**over))


def test_missing_field():
    raw = _raw()
    del raw["b_lower"]
    with pytest.raises(ValidationError, match="b_lower"):
        validate(raw)


def test_matching_horizon_accepted():
    assert validate(_raw(tau_bar=1.0)).tau_bar == 1.0


def test_tail_must_vanish_for_sloped_splines():
    with pytest.raises(NonVanishingTail):
        validate(_raw(b_upper=[[[-30, 31]]], b_lower=[[[-30, 31]]]))


def test_validated_arrays_are_read_only(hat):
    with pytest.raises(ValueError):
        hat.b_upper[0, 0, 0] = 1.0


def test_eval_basis_examples():
    assert eval_basis(0, 0, 0.1, 0.05) == 1.0
    assert eval_basis(1, 0, 0.5, 2.0) == pytest.approx(0.5)
    assert eval_basis(1, 1, 0.5, 0.4) == 0.0


def test_eval_basis_right_continuous_indicator():
    assert eval_basis(0, 1, 0.5, 0.5) == 1.0
    assert eval_basis(0, 0, 0.5, 0.5) == 0.0


def test_integrate_basis_examples():
    assert integrate_basis(0, 3, 0.25, 5) == pytest.approx(0.25)
    assert integrate_basis(1, 0, 0.5, 2) == pytest.approx(0.375)
    assert integrate_basis(1, 1, 0.5, 2) == pytest.approx(0.125)
    assert -30 * 0.375 + 30 * 0.125 == pytest.approx(-7.5)


def test_eval_bound_piecewise_levels(expo):
    assert eval_bound(expo, "upper", 0, 1, 0.25) == pytest.approx(-0.2)
    assert eval_bound(expo, "lower", 0, 1, 0.25) == pytest.approx(-0.3)


def test_eval_bound_zero_coefficients():
    m = validate({"n": 1, "n0": 2, "h": 0.3, "N": 4, "b_upper": np.zeros((1, 1, 4)),
                  "b_lower": np.zeros((1, 1, 4))})
    assert eval_bound(m, "upper", 0, 0, 0.77) == 0.0


def test_eval_bound_index_checks(hat):
    with pytest.raises(IndexOutOfRange):
        eval_bound(hat, "upper", 1, 0, 0.2)
    with pytest.raises(ValueError):
        eval_bound(hat, "middle", 0, 0, 0.2)


@given(spline_bounds(), st.lists(st.floats(0.0, 1.0), min_size=1, max_size=20))
def test_bounds_ordered_pointwise(m, fracs):
    tau = np.array(fracs) * m.tau_bar
    for i in range(m.n):
        for j in range(m.n):
            assert np.all(eval_bound(m, "lower", i, j, tau) <= eval_bound(m, "upper", i, j, tau) + 1e-12)


@given(st.integers(0, 4), st.integers(1, 10), st.floats(0.05, 2.0), st.data())
def test_integrate_basis_matches_quadrature(n0, N, h, data):
    k = data.draw(st.integers(0, N - 1))
    knots = [j * h for j in range(N + 1)]
    val, _ = quad(lambda t: eval_basis(n0, k, h, t), 0.0, N * h, points=knots, limit=200,
                  epsabs=0, epsrel=1e-13)
    exact = integrate_basis(n0, k, h, N)
    assert abs(exact - val) <= 1e-8 * abs(exact)


@given(st.integers(0, 4), st.integers(0, 6), st.floats(0.05, 2.0), st.floats(0.0, 20.0))
def test_eval_basis_nonnegative(n0, k, h, tau):
    assert eval_basis(n0, k, h, tau) >= 0.0


def test_concrete_kernel_evaluates_spline(hat):
    k = ConcreteSplineKernel(1, 1, 0.5, 2, hat.b_upper)
    # Hat shape: -30 tau on the first cell, then up to the horizon.
    assert k(0.25)[0, 0] == pytest.approx(-7.5)
    assert k(0.75)[0, 0] == pytest.approx(-30 * 0.5 + 30 * 0.25)
    assert k.as_bounds() == hat
