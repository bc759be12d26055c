"""Tests for loop-gain and robust-stability analysis."""

import numpy as np
import pytest

from loopshaped_mpc.application.services.robust_analysis import (
    default_frequency_grid,
    is_robust,
    loop_gain_compare,
    stability_margin,
)
from loopshaped_mpc.domain.models.errors import DimensionMismatchError
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization


@pytest.fixture
def double_integrator() -> StateSpaceRealization:
    return StateSpaceRealization(
        a=np.array([[0.0, 1.0], [0.0, 0.0]]),
        b=np.array([[0.0], [1.0]]),
        c=np.eye(2),
        d=np.zeros((2, 1)),
    )


def test_default_grid_spans_six_decades() -> None:
    """Given no arguments, when building the grid, then it has 200 points on [1e-2, 1e4]."""
    grid = default_frequency_grid()

    assert grid.size == 200
    assert grid[0] == pytest.approx(1e-2)
    assert grid[-1] == pytest.approx(1e4)


@pytest.mark.parametrize(("gain", "margin"), [(1.0, 2.0), (-0.5, 1.0)])
def test_siso_margin(gain: float, margin: float) -> None:
    """Given a SISO loop gain, when computing the margin, then it is |1 + 1/gk|."""
    analysis = stability_margin(np.array([1.0]), np.array([gain]))

    assert analysis.margins[0] == pytest.approx(margin)


def test_diagonal_mimo_margin_is_the_worst_channel() -> None:
    """Given a diagonal 2x2 loop gain, when computing the margin, then the worst channel wins."""
    sample = np.diag([2.0, -0.5 + 0.1j])

    analysis = stability_margin(np.array([1.0]), sample[None, :, :])

    expected = min(abs(1 + 1 / 2.0), abs(1 + 1 / (-0.5 + 0.1j)))
    assert analysis.margins[0] == pytest.approx(expected)


def test_singular_sample_has_undefined_margin() -> None:
    """Given a zero loop gain sample, when computing margins, then that margin is NaN."""
    analysis = stability_margin(np.array([1.0, 2.0]), np.array([0.0, 1.0]))

    assert np.isnan(analysis.margins[0])
    assert analysis.margins[1] == pytest.approx(2.0)


def test_robustness_check_ignores_undefined_samples() -> None:
    """Given margins with a NaN, when checking a bound, then only defined samples count."""
    analysis = stability_margin(np.array([1.0, 2.0, 3.0]), np.array([0.0, 1.0, -0.5]))

    assert is_robust(analysis, 0.9)
    assert not is_robust(analysis, np.array([0.0, 0.5, 1.5]))


def test_identity_shaping_reproduces_the_baseline_loop(
    double_integrator: StateSpaceRealization,
) -> None:
    """Given alpha == beta, when comparing loops, then shaped and baseline gains coincide."""
    baseline, shaped = loop_gain_compare(
        double_integrator, np.eye(2), np.eye(1), ShapingSpec.from_pairs([(0.02, 0.02)])
    )

    np.testing.assert_allclose(shaped.loop_gains, baseline.loop_gains, rtol=1e-9)


def test_shaping_lowers_the_high_frequency_loop_gain(
    double_integrator: StateSpaceRealization,
) -> None:
    """Given beta=0.1, alpha=0.01, when comparing loops, then high frequencies see less gain
    while both loops keep the integrating slope of the plant at low frequency."""
    grid = np.logspace(-3.0, 4.0, 141)

    baseline, shaped = loop_gain_compare(
        double_integrator, np.eye(2), np.eye(1), ShapingSpec.from_pairs([(0.01, 0.1)]), grid
    )

    high = grid >= 100.0
    assert np.all(shaped.magnitudes()[high] < baseline.magnitudes()[high])
    ratio = shaped.magnitudes() / baseline.magnitudes()
    low = grid <= 1e-2
    assert np.all(baseline.magnitudes()[low] > 1e3)
    np.testing.assert_allclose(ratio[low], ratio[0], rtol=1e-2)


def test_loop_comparison_needs_a_single_input_plant() -> None:
    """Given a two-input plant, when comparing loops, then a dimension error is raised."""
    plant = StateSpaceRealization(a=-np.eye(2), b=np.eye(2), c=np.eye(2), d=np.zeros((2, 2)))

    with pytest.raises(DimensionMismatchError):
        loop_gain_compare(plant, np.eye(2), np.eye(2), ShapingSpec.identity(1))
