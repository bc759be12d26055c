"""Tests for the plan-tracking controller."""

import logging

import numpy as np
import pytest

from loopshaped_mpc.application.services.loopshaping import make_filter_bank
from loopshaped_mpc.application.services.quadruped_model import default_state, equilibrium_input
from loopshaped_mpc.application.services.tracking_controller import TrackingController
from loopshaped_mpc.domain.models.errors import PlanExpiredError
from loopshaped_mpc.domain.models.gait import GaitSchedule
from loopshaped_mpc.domain.models.kinodynamic import (
    INPUT_DIM,
    JOINT_VELOCITIES,
    STATE_DIM,
    input_force,
    state_joints,
)
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.tracker_gains import TrackerGains
from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory

NO_FILTER = np.zeros(0)


@pytest.fixture
def robot() -> RobotParams:
    return RobotParams.anymal_like()


def constant_plan(state: np.ndarray, u: np.ndarray) -> PlanSnapshot:
    trajectory = Trajectory(
        times=np.linspace(0.0, 1.0, 11),
        states=np.tile(state, (11, 1)),
        inputs=np.tile(u, (10, 1)),
    )
    return PlanSnapshot(
        trajectory=trajectory,
        policy=FeedbackPolicy.open_loop(trajectory),
        bank=make_filter_bank(ShapingSpec.identity(INPUT_DIM)),
        state_dim=STATE_DIM,
    )


def plant_at(state: np.ndarray, t: float) -> PlantState:
    return PlantState(
        time=t,
        state=state,
        contact=np.ones(4, dtype=bool),
        penetration=np.zeros(4),
        lagged_inputs=np.zeros(INPUT_DIM),
        leg_extension=np.zeros(4),
    )


def test_zero_error_commands_the_plan(robot: RobotParams) -> None:
    """Given a measured state on the plan, when commanding, then the command is the plan input."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.ones(4, dtype=bool))
    tracker = TrackingController(robot, GaitSchedule.standing(), TrackerGains())

    result = tracker.command(constant_plan(x, u), plant_at(x, 0.42), NO_FILTER)

    np.testing.assert_allclose(result.command, u, atol=1e-9)
    np.testing.assert_allclose(result.planned_input, u)
    assert not result.dls_fallback


def test_low_com_adds_force_on_stance_feet(robot: RobotParams) -> None:
    """Given the CoM 1 cm low and two stance feet, when commanding, then each gets +2.5 N in z."""
    gait = GaitSchedule.trot()
    stance = np.array([True, False, False, True])
    x = default_state(robot)
    u = equilibrium_input(robot, stance)
    measured = x.copy()
    measured[5] -= 0.01
    tracker = TrackingController(robot, gait, TrackerGains(position_kp=500.0))

    result = tracker.command(constant_plan(x, u), plant_at(measured, 0.1), NO_FILTER)

    np.testing.assert_array_equal(result.stance, stance)
    for leg in (0, 3):
        added = result.command[input_force(leg)] - u[input_force(leg)]
        np.testing.assert_allclose(added, [0.0, 0.0, 2.5], atol=1e-9)
    for leg in (1, 2):
        np.testing.assert_array_equal(result.command[input_force(leg)], np.zeros(3))


def test_feedforward_weight_scales_planned_forces(robot: RobotParams) -> None:
    """Given half force feedforward and no error, when commanding, then forces are halved."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.ones(4, dtype=bool))
    tracker = TrackingController(
        robot, GaitSchedule.standing(), TrackerGains(force_feedforward_weight=0.5)
    )

    result = tracker.command(constant_plan(x, u), plant_at(x, 0.2), NO_FILTER)

    np.testing.assert_allclose(result.command[:12], 0.5 * u[:12])


def test_swing_foot_error_moves_the_leg(robot: RobotParams) -> None:
    """Given a swing foot off its planned position, when commanding, then its joints move."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.array([True, False, False, True]))
    measured = x.copy()
    measured[state_joints(1)] += [0.0, 0.1, -0.1]
    tracker = TrackingController(robot, GaitSchedule.trot(), TrackerGains())

    result = tracker.command(constant_plan(x, u), plant_at(measured, 0.1), NO_FILTER)

    rates = result.command[JOINT_VELOCITIES].reshape(4, 3)
    assert np.any(rates[1] != 0.0)
    np.testing.assert_array_equal(rates[[0, 2, 3]], np.zeros((3, 3)))
    assert not result.dls_fallback


def test_singular_swing_leg_uses_damped_least_squares(
    robot: RobotParams, caplog: pytest.LogCaptureFixture
) -> None:
    """Given a stretched swing leg with a foot error, when commanding, then DLS engages."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.array([True, False, False, True]))
    measured = x.copy()
    measured[state_joints(1)] = 0.0
    tracker = TrackingController(robot, GaitSchedule.trot(), TrackerGains())

    with caplog.at_level(logging.WARNING):
        result = tracker.command(constant_plan(x, u), plant_at(measured, 0.1), NO_FILTER)

    assert result.dls_fallback
    assert np.all(np.isfinite(result.command))
    assert "damped least-squares" in caplog.text


def test_expired_plan_raises(robot: RobotParams) -> None:
    """Given a plant past the end of the plan, when commanding, then PlanExpiredError is raised."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.ones(4, dtype=bool))
    tracker = TrackingController(robot, GaitSchedule.standing(), TrackerGains())

    with pytest.raises(PlanExpiredError, match="plan covers"):
        tracker.command(constant_plan(x, u), plant_at(x, 1.5), NO_FILTER)


def test_advancing_filter_past_plan_raises(robot: RobotParams) -> None:
    """Given a filter step ending after the plan, when advancing, then the plan has expired."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.ones(4, dtype=bool))
    tracker = TrackingController(robot, GaitSchedule.standing(), TrackerGains())

    with pytest.raises(PlanExpiredError):
        tracker.advance_filter(constant_plan(x, u), NO_FILTER, 0.999, 0.01)


def test_negative_gains_are_rejected() -> None:
    """Given a negative gain, when building tracker gains, then a ValueError is raised."""
    with pytest.raises(ValueError, match="swing_kp"):
        TrackerGains(swing_kp=-1.0)
