"""Tests for gait timing, the swing curve and contact-mode constraints."""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from loopshaped_mpc.application.services.gait_planner import (
    constraint_rows,
    mode_at,
    mode_constraints,
    stance_mask,
    swing_reference,
)
from loopshaped_mpc.application.services.quadruped_model import default_state, equilibrium_input
from loopshaped_mpc.domain.models.gait import GaitSchedule, LegMode, SwingProfile
from loopshaped_mpc.domain.models.kinodynamic import INPUT_DIM, input_force
from loopshaped_mpc.domain.models.robot_params import RobotParams

SWING = GaitSchedule.trot().swing_duration


def test_trot_starts_with_left_front_in_stance() -> None:
    """Given a 0.7 s trot, when reading modes at t=0, then LF and RH stand while RF and LH swing."""
    gait = GaitSchedule.trot()

    modes = [mode_at(gait, 0.0, leg).mode for leg in range(4)]

    assert modes == [LegMode.STANCE, LegMode.SWING, LegMode.SWING, LegMode.STANCE]


def test_trot_flips_after_half_a_period() -> None:
    """Given a 0.7 s trot, when reading modes at t=0.35, then the pairs have swapped."""
    gait = GaitSchedule.trot()

    np.testing.assert_array_equal(stance_mask(gait, 0.35), [False, True, True, False])


def test_standing_gait_never_swings() -> None:
    """Given a duty factor of one, when sampling a period, then every leg stays in stance."""
    gait = GaitSchedule.standing()

    for t in np.linspace(0.0, 2.0, 41):
        assert stance_mask(gait, float(t)).all()


def test_modes_are_periodic() -> None:
    """Given a trot, when shifting time by one period, then modes repeat over ten periods."""
    gait = GaitSchedule.trot()

    for k in range(200):
        t = 0.035 * k
        for leg in range(4):
            now, later = mode_at(gait, t, leg), mode_at(gait, t + gait.period, leg)
            assert now.mode is later.mode
            assert now.phase == pytest.approx(later.phase, abs=1e-9)


def test_trot_always_has_fourteen_constraint_rows() -> None:
    """Given a trot with two stance and two swing legs, when counting rows, then 6 + 8 = 14."""
    gait = GaitSchedule.trot()

    assert {constraint_rows(gait, 0.01 * k) for k in range(140)} == {14}


def test_negative_time_is_rejected() -> None:
    """Given a negative time, when reading the mode, then a ValueError is raised."""
    with pytest.raises(ValueError, match="nonnegative"):
        mode_at(GaitSchedule.trot(), -0.1, 0)


@pytest.mark.parametrize(
    "kwargs",
    [{"period": 0.0}, {"duty_factor": 1.5}, {"offsets": (0.0, 0.5, 1.0, 0.0)}, {"friction": 0.0}],
)
def test_invalid_gait_is_rejected(kwargs: dict[str, object]) -> None:
    """Given an out-of-range gait parameter, when constructing, then a ValueError is raised."""
    with pytest.raises(ValueError):
        GaitSchedule(**kwargs)  # type: ignore[arg-type]


def test_swing_starts_at_rest_and_touches_down_at_target_speed() -> None:
    """Given the default profile, when evaluating the ends, then c(0)=0 and c(1)=-0.75 m/s."""
    profile = SwingProfile()

    lift_rate, lift_height = swing_reference(profile, 0.0, SWING)
    touch_rate, touch_height = swing_reference(profile, 1.0, SWING)

    assert lift_rate == 0.0
    assert lift_height == 0.0
    assert touch_rate == pytest.approx(-0.75)
    assert touch_height == pytest.approx(0.0, abs=1e-12)


def test_swing_reaches_apex_height() -> None:
    """Given the default profile, when sampling the swing, then the peak displacement is 0.08 m."""
    profile = SwingProfile()
    phases = np.linspace(0.0, 1.0, 2001)

    heights = np.array([swing_reference(profile, float(p), SWING)[1] for p in phases])

    assert heights.max() == pytest.approx(0.08, abs=1e-6)


def test_swing_velocity_integrates_to_the_displacement() -> None:
    """Given the swing curve, when integrating c over the swing, then it ends at or below zero."""
    profile = SwingProfile()
    phases = np.linspace(0.0, 1.0, 4001)
    rates = np.array([swing_reference(profile, float(p), SWING)[0] for p in phases])
    heights = np.array([swing_reference(profile, float(p), SWING)[1] for p in phases])

    total = trapezoid(rates, phases * SWING)

    assert total <= 1e-6
    midway = 2000
    partial = trapezoid(rates[: midway + 1], phases[: midway + 1] * SWING)
    assert partial == pytest.approx(heights[midway], abs=1e-6)


def test_short_swing_keeps_touchdown_speed() -> None:
    """Given a swing too short for a gentle descent, when evaluating, then c(1) is still -0.75."""
    profile = SwingProfile(apex_height=0.15)

    rate, height = swing_reference(profile, 1.0, 0.2)

    assert rate == pytest.approx(-0.75)
    assert height == pytest.approx(0.0, abs=1e-12)


def test_swing_phase_outside_unit_interval_is_rejected() -> None:
    """Given a phase above one, when evaluating the swing curve, then a ValueError is raised."""
    with pytest.raises(ValueError, match="swing phase"):
        swing_reference(SwingProfile(), 1.2, SWING)


def test_standing_equilibrium_satisfies_constraints() -> None:
    """Given a standing robot at equilibrium, when evaluating constraints, then all vanish."""
    robot = RobotParams.anymal_like()
    gait = GaitSchedule.standing()

    residual = mode_constraints(
        default_state(robot),
        equilibrium_input(robot, np.ones(4, dtype=bool)),
        0.3,
        gait,
        SwingProfile(),
        robot,
    )

    assert residual.shape == (12,)
    np.testing.assert_allclose(residual, 0.0, atol=1e-10)


def test_resting_swing_foot_misses_the_swing_curve() -> None:
    """Given a still swing foot a quarter into swing, when evaluating, then the residual is -c."""
    robot = RobotParams.anymal_like()
    gait = GaitSchedule.trot()
    profile = SwingProfile()
    t = 0.0875
    assert mode_at(gait, t, 1).phase == pytest.approx(0.25)

    residual = mode_constraints(
        default_state(robot), np.zeros(INPUT_DIM), t, gait, profile, robot
    )

    target, _ = swing_reference(profile, 0.25, gait.swing_duration)
    assert residual.shape == (14,)
    assert target > 0.0
    assert residual[3] == pytest.approx(-target, rel=1e-9)


def test_swing_force_rows_repeat_the_force() -> None:
    """Given a force on a swing leg, when evaluating constraints, then its rows equal that force."""
    robot = RobotParams.anymal_like()
    u = np.zeros(INPUT_DIM)
    u[input_force(1)] = [5.0, -3.0, 20.0]

    residual = mode_constraints(
        default_state(robot), u, 0.1, GaitSchedule.trot(), SwingProfile(), robot
    )

    np.testing.assert_array_equal(residual[4:7], [5.0, -3.0, 20.0])
