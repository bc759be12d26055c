"""Tests for transfer functions, realizations and LQR synthesis."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loopshaped_mpc.application.services.lti_core import (
    balanced_first_order,
    lqr_gain,
    ss_freq_response,
    tf_eval,
)
from loopshaped_mpc.domain.models.errors import (
    DimensionMismatchError,
    EvaluationAtPoleError,
    SynthesisError,
    UnsupportedStructureError,
)
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization
from loopshaped_mpc.domain.models.transfer_function import RationalTransferFunction

GRID = [10.0**k for k in range(-2, 5)]


def shaping_filter(alpha: float, beta: float) -> RationalTransferFunction:
    """r(w) = (1 + beta jw) / (1 + alpha jw)."""
    return RationalTransferFunction(numerator=(1.0, beta), denominator=(1.0, alpha))


def inverse_filter(alpha: float, beta: float) -> RationalTransferFunction:
    return RationalTransferFunction(numerator=(1.0, alpha), denominator=(1.0, beta))


def test_shaping_filter_has_unit_dc_gain() -> None:
    """Given r with beta=0.1, alpha=0.01, when evaluated at zero, then the gain is one."""
    assert tf_eval(shaping_filter(0.01, 0.1), 0.0) == 1.0 + 0.0j


def test_shaping_filter_high_frequency_weight() -> None:
    """Given r with beta/alpha=10, when evaluated far above the corner, then |r|^2 -> 100."""
    value = tf_eval(shaping_filter(0.01, 0.1), 1e6)

    assert abs(value) ** 2 == pytest.approx(100.0, rel=1e-3)


def test_shaping_filter_at_corner_frequency() -> None:
    """Given r with beta=0.1, alpha=0.01, when evaluated at 10 rad/s, then it is (1+j)/(1+0.1j)."""
    value = tf_eval(shaping_filter(0.01, 0.1), 10.0)

    assert value == pytest.approx((1 + 1j) / (1 + 0.1j), rel=1e-12)
    assert abs(value) == pytest.approx(1.40720, abs=1e-5)


def test_tf_eval_at_pole_raises() -> None:
    """Given 1/(1+s^2), when evaluated at its imaginary-axis pole, then it raises."""
    tf = RationalTransferFunction(numerator=(1.0,), denominator=(1.0, 0.0, 1.0))

    with pytest.raises(EvaluationAtPoleError):
        tf_eval(tf, 1.0)


def test_tf_eval_rejects_negative_frequency() -> None:
    """Given a negative frequency, when evaluating, then a ValueError is raised."""
    with pytest.raises(ValueError, match="nonnegative"):
        tf_eval(shaping_filter(0.01, 0.1), -1.0)


def test_transfer_function_rejects_pole_at_origin() -> None:
    """Given a denominator without constant term, when constructing, then it is rejected."""
    with pytest.raises(UnsupportedStructureError, match="constant coefficient"):
        RationalTransferFunction(numerator=(1.0,), denominator=(0.0, 1.0))


def test_static_realization_response() -> None:
    """Given a pure gain D=0.1, when evaluating at any frequency, then the response is 0.1."""
    static = StateSpaceRealization.static_gain(0.1)

    for omega in (0.0, 1.0, 1e4):
        assert ss_freq_response(static, omega)[0, 0] == pytest.approx(0.1)


def test_inverse_filter_realization() -> None:
    """Given s(w) for beta=0.1, alpha=0.01, when realized, then A=-10, B=C=3, D=0.1."""
    ss = balanced_first_order(inverse_filter(0.01, 0.1))

    assert ss.a[0, 0] == pytest.approx(-10.0)
    assert ss.b[0, 0] == pytest.approx(3.0)
    assert ss.c[0, 0] == pytest.approx(3.0)
    assert ss.d[0, 0] == pytest.approx(0.1)
    assert ss_freq_response(ss, 0.0)[0, 0] == pytest.approx(1.0)
    assert abs(ss_freq_response(ss, 1e4)[0, 0]) == pytest.approx(0.1, rel=1e-3)


def test_shaping_filter_realization_has_negative_residue() -> None:
    """Given r for beta=0.1, alpha=0.01, when realized, then |B|=|C|=30 with BC < 0."""
    ss = balanced_first_order(shaping_filter(0.01, 0.1))

    assert ss.a[0, 0] == pytest.approx(-100.0)
    assert ss.d[0, 0] == pytest.approx(10.0)
    assert abs(ss.b[0, 0]) == pytest.approx(30.0)
    assert abs(ss.c[0, 0]) == pytest.approx(30.0)
    assert ss.b[0, 0] * ss.c[0, 0] < 0.0


def test_identity_realization_has_no_state() -> None:
    """Given the unit transfer function, when realized, then it is a stateless gain of one."""
    ss = balanced_first_order(RationalTransferFunction.identity())

    assert ss.n_states == 0
    assert ss.d[0, 0] == 1.0


@pytest.mark.parametrize(
    "tf",
    [
        RationalTransferFunction(numerator=(0.0, 1.0), denominator=(1.0,)),
        RationalTransferFunction(numerator=(1.0,), denominator=(1.0, 1.0, 1.0)),
        RationalTransferFunction(numerator=(1.0,), denominator=(1.0, -1.0)),
    ],
    ids=["improper", "second-order", "unstable"],
)
def test_unsupported_realizations_raise(tf: RationalTransferFunction) -> None:
    """Given an improper, higher-order or unstable filter, when realized, then it is rejected."""
    with pytest.raises(UnsupportedStructureError):
        balanced_first_order(tf)


@given(
    beta=st.floats(min_value=1e-3, max_value=1.0),
    ratio=st.floats(min_value=0.01, max_value=0.99),
    inverse=st.booleans(),
)
def test_balanced_realization_matches_transfer_function(
    beta: float, ratio: float, inverse: bool
) -> None:
    """Given any first-order shaping filter, when realized, then the responses agree."""
    alpha = ratio * beta
    tf = inverse_filter(alpha, beta) if inverse else shaping_filter(alpha, beta)

    ss = balanced_first_order(tf)

    assert ss.a[0, 0] < 0.0
    assert abs(ss.b[0, 0]) == pytest.approx(abs(ss.c[0, 0]), rel=1e-12)
    for omega in GRID:
        expected = tf_eval(tf, omega)
        assert ss_freq_response(ss, omega)[0, 0] == pytest.approx(expected, rel=1e-9)


def test_lqr_scalar_integrator() -> None:
    """Given A=0, B=Q=R=1, when synthesizing, then P=1 and K=1."""
    result = lqr_gain(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)), np.ones((1, 1)))

    assert result.cost_to_go[0, 0] == pytest.approx(1.0)
    assert result.gain[0, 0] == pytest.approx(1.0)


def test_lqr_zero_state_cost_on_stable_plant() -> None:
    """Given Q=0 and a Hurwitz A, when synthesizing, then no feedback is needed."""
    result = lqr_gain(-np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2))

    np.testing.assert_allclose(result.gain, np.zeros((2, 2)), atol=1e-12)


def test_lqr_double_integrator() -> None:
    """Given the double integrator with Q=I, R=1, when synthesizing, then K=[1, sqrt(3)]."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    b = np.array([[0.0], [1.0]])

    result = lqr_gain(a, b, np.eye(2), np.eye(1))

    np.testing.assert_allclose(result.gain, [[1.0, math.sqrt(3.0)]], rtol=1e-9)
    assert np.all(result.closed_loop_eigenvalues.real < 0.0)
    assert result.residual <= 1e-8 * (1.0 + np.linalg.norm(result.cost_to_go))


def test_lqr_rejects_indefinite_input_weight() -> None:
    """Given R with a negative eigenvalue, when synthesizing, then a SynthesisError is raised."""
    with pytest.raises(SynthesisError, match="positive definite"):
        lqr_gain(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)), -np.ones((1, 1)))


def test_lqr_rejects_unstabilizable_pair() -> None:
    """Given an unstable mode no input reaches, when synthesizing, then it fails."""
    a = np.diag([1.0, -1.0])
    b = np.array([[0.0], [1.0]])

    with pytest.raises(SynthesisError):
        lqr_gain(a, b, np.eye(2), np.eye(1))


def test_lqr_rejects_mismatched_dimensions() -> None:
    """Given Q of the wrong size, when synthesizing, then a dimension error is raised."""
    with pytest.raises(DimensionMismatchError):
        lqr_gain(np.zeros((2, 2)), np.ones((2, 1)), np.eye(3), np.eye(1))
