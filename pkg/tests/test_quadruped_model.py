"""Tests for the kinodynamic quadruped model and its tracking cost."""

import math
from collections.abc import Callable

import numpy as np
import pytest

from loopshaped_mpc.application.services.quadruped_model import (
    build_cost,
    default_state,
    eom,
    eom_jacobian,
    equilibrium_input,
    foot_positions_world,
    foot_velocity,
    forward_kinematics,
    is_near_singular,
    leg_jacobian,
    leg_jacobians,
    rotation_matrix,
)
from loopshaped_mpc.domain.models.cost_weights import CostWeights
from loopshaped_mpc.domain.models.errors import ChartError
from loopshaped_mpc.domain.models.kinodynamic import (
    ANGULAR_RATE,
    BASE,
    FORCES,
    INPUT_DIM,
    JOINT_VELOCITIES,
    JOINTS,
    LINEAR_VELOCITY,
    POSITION,
    STATE_DIM,
    input_force,
    input_joint_velocities,
)
from loopshaped_mpc.domain.models.robot_params import RobotParams

STEP = 1e-6


@pytest.fixture
def robot() -> RobotParams:
    return RobotParams.anymal_like()


def random_point(
    rng: np.random.Generator, robot: RobotParams
) -> tuple[np.ndarray, np.ndarray]:
    x = default_state(robot)
    x[:3] += rng.uniform(-0.3, 0.3, 3)
    x[POSITION] += rng.uniform(-0.5, 0.5, 3)
    x[ANGULAR_RATE] = rng.uniform(-1.0, 1.0, 3)
    x[LINEAR_VELOCITY] = rng.uniform(-1.0, 1.0, 3)
    x[JOINTS] += rng.uniform(-0.3, 0.3, 12)
    u = np.concatenate([rng.uniform(-50.0, 100.0, 12), rng.uniform(-1.0, 1.0, 12)])
    return x, u


def central_difference(along: Callable[[float], np.ndarray]) -> np.ndarray:
    return (along(STEP) - along(-STEP)) / (2 * STEP)


def test_standing_equilibrium_has_no_base_acceleration(robot: RobotParams) -> None:
    """Given the default state and four feet sharing the weight, when evaluating, then it rests."""
    x = default_state(robot)
    u = equilibrium_input(robot, np.ones(4, dtype=bool))

    derivative = eom(x, u, robot)

    np.testing.assert_allclose(derivative, np.zeros(STATE_DIM), atol=1e-10)


def test_equilibrium_input_splits_weight(robot: RobotParams) -> None:
    """Given 30 kg on four feet, when building the equilibrium, then each carries 73.575 N."""
    u = equilibrium_input(robot, np.ones(4, dtype=bool))

    forces = u[FORCES].reshape(4, 3)
    np.testing.assert_allclose(forces[:, 2], np.full(4, 73.575))
    np.testing.assert_allclose(forces[:, :2], 0.0)
    np.testing.assert_array_equal(u[JOINT_VELOCITIES], np.zeros(12))


def test_equilibrium_input_needs_a_stance_leg(robot: RobotParams) -> None:
    """Given no stance leg, when building the equilibrium, then a ValueError is raised."""
    with pytest.raises(ValueError, match="stance leg"):
        equilibrium_input(robot, np.zeros(4, dtype=bool))


def test_free_fall_accelerates_at_gravity(robot: RobotParams) -> None:
    """Given no forces and no rates at a tilted pose, when evaluating, then |v_dot| is g."""
    x = default_state(robot)
    x[:3] = [0.2, -0.3, 0.5]

    derivative = eom(x, np.zeros(INPUT_DIM), robot)

    assert np.linalg.norm(derivative[LINEAR_VELOCITY]) == pytest.approx(9.81)
    world = rotation_matrix(x[:3]) @ derivative[LINEAR_VELOCITY]
    np.testing.assert_allclose(world, [0.0, 0.0, -9.81], atol=1e-12)


def test_single_foot_force_torque() -> None:
    """Given a foot at (0.3, 0.2, -0.45) pushing 120 N up, then the torque is (24, -36, 0)."""
    robot = RobotParams.with_stand_height(
        mass=30.0,
        inertia=np.eye(3),
        hip_offsets=np.array(
            [[0.3, 0.09, 0.0], [0.3, -0.09, 0.0], [-0.3, 0.09, 0.0], [-0.3, -0.09, 0.0]]
        ),
        link_lengths=np.tile([0.11, 0.25, 0.33], (4, 1)),
        stand_height=0.45,
    )
    u = np.zeros(INPUT_DIM)
    u[input_force(0)] = [0.0, 0.0, 120.0]

    derivative = eom(default_state(robot), u, robot)

    np.testing.assert_allclose(derivative[ANGULAR_RATE], [24.0, -36.0, 0.0], atol=1e-9)


def test_chart_singularity_raises(robot: RobotParams) -> None:
    """Given a pitch at the Euler singularity, when evaluating the dynamics, then it fails."""
    x = default_state(robot)
    x[1] = math.pi / 2.0 - 1e-4

    with pytest.raises(ChartError):
        eom(x, np.zeros(INPUT_DIM), robot)


def test_newton_consistency(robot: RobotParams) -> None:
    """Given random states and inputs, when evaluating, then m R v_dot is the net force."""
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, u = random_point(rng, robot)
        x[ANGULAR_RATE] = 0.0

        derivative = eom(x, u, robot)

        net = u[FORCES].reshape(4, 3).sum(axis=0) + robot.mass * np.array([0.0, 0.0, -9.81])
        momentum_rate = robot.mass * rotation_matrix(x[:3]) @ derivative[LINEAR_VELOCITY]
        np.testing.assert_allclose(momentum_rate, net, atol=1e-9)


def test_yaw_equivariance(robot: RobotParams) -> None:
    """Given a world frame turned in yaw, when evaluating, then derivatives rotate along."""
    rng = np.random.default_rng(1)
    x, u = random_point(rng, robot)
    turn = rotation_matrix(np.array([0.0, 0.0, 0.8]))
    turned_x = x.copy()
    turned_x[2] += 0.8
    turned_x[POSITION] = turn @ x[POSITION]
    turned_u = u.copy()
    turned_u[FORCES] = (u[FORCES].reshape(4, 3) @ turn.T).reshape(-1)

    derivative = eom(x, u, robot)
    turned = eom(turned_x, turned_u, robot)

    np.testing.assert_allclose(turned[POSITION], turn @ derivative[POSITION], atol=1e-10)
    np.testing.assert_allclose(turned[:3], derivative[:3], atol=1e-10)
    np.testing.assert_allclose(turned[6:], derivative[6:], atol=1e-10)


def test_stacked_eom_matches_pointwise(robot: RobotParams) -> None:
    """Given a batch of points, when evaluating at once, then each row matches the single call."""
    rng = np.random.default_rng(2)
    points = [random_point(rng, robot) for _ in range(5)]
    xs = np.stack([p[0] for p in points])
    us = np.stack([p[1] for p in points])

    stacked = eom(xs, us, robot)

    for row, (x, u) in zip(stacked, points, strict=True):
        np.testing.assert_allclose(row, eom(x, u, robot), rtol=1e-12, atol=1e-12)


def test_eom_jacobian_matches_finite_differences(robot: RobotParams) -> None:
    """Given random points, when linearizing, then analytic and central differences agree."""
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, u = random_point(rng, robot)

        a, b = eom_jacobian(x, u, robot)

        fd_a = np.stack(
            [central_difference(lambda s: eom(x + s * e, u, robot)) for e in np.eye(STATE_DIM)],
            axis=1,
        )
        fd_b = np.stack(
            [central_difference(lambda s: eom(x, u + s * e, robot)) for e in np.eye(INPUT_DIM)],
            axis=1,
        )
        np.testing.assert_allclose(a, fd_a, rtol=1e-5, atol=1e-6)
        np.testing.assert_allclose(b, fd_b, rtol=1e-5, atol=1e-6)


def test_default_configuration_reaches_footprint(robot: RobotParams) -> None:
    """Given the default joints, when computing kinematics, then feet sit on the footprint."""
    feet = forward_kinematics(robot.default_joints, robot)

    np.testing.assert_allclose(feet, robot.default_footprint(), atol=1e-12)


def test_leg_jacobians_match_finite_differences(robot: RobotParams) -> None:
    """Given random joint angles, when differentiating, then analytic Jacobians match."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        q = robot.default_joints + rng.uniform(-0.5, 0.5, 12)

        jacobians = leg_jacobians(q, robot)

        for index in range(12):
            e = np.zeros(12)
            e[index] = STEP
            column = (forward_kinematics(q + e, robot) - forward_kinematics(q - e, robot)) / (
                2 * STEP
            )
            leg, joint = divmod(index, 3)
            np.testing.assert_allclose(jacobians[leg, :, joint], column[leg], rtol=1e-6, atol=1e-8)


def test_stretched_leg_is_near_singular(robot: RobotParams) -> None:
    """Given a fully stretched leg, when checking its Jacobian, then it is flagged."""
    q = np.array(robot.default_joints)
    q[0:3] = 0.0

    assert is_near_singular(leg_jacobian(q, 0, robot))
    assert not is_near_singular(leg_jacobian(robot.default_joints, 0, robot))


def test_foot_velocity_without_motion_is_zero(robot: RobotParams) -> None:
    """Given zero twist and joint velocity, when computing foot velocities, then all vanish."""
    velocities = foot_velocity(default_state(robot), np.zeros(INPUT_DIM), robot)

    np.testing.assert_allclose(velocities, np.zeros((4, 3)), atol=1e-14)


def test_foot_velocity_under_pure_translation(robot: RobotParams) -> None:
    """Given v = (1, 0, 0) on a level base, when computing foot velocities, then every x is one."""
    x = default_state(robot)
    x[LINEAR_VELOCITY] = [1.0, 0.0, 0.0]

    velocities = foot_velocity(x, np.zeros(INPUT_DIM), robot)

    np.testing.assert_allclose(velocities[:, 0], np.ones(4))
    np.testing.assert_allclose(velocities[:, 1:], 0.0, atol=1e-14)


def test_foot_velocity_matches_flow_of_foot_positions(robot: RobotParams) -> None:
    """Given random points, when moving along the dynamics, then foot positions change at v_EE."""
    rng = np.random.default_rng(5)
    for _ in range(10):
        x, u = random_point(rng, robot)
        flow = eom(x, u, robot)

        fd = (
            foot_positions_world(x + STEP * flow, robot)
            - foot_positions_world(x - STEP * flow, robot)
        ) / (2 * STEP)

        np.testing.assert_allclose(foot_velocity(x, u, robot), fd, atol=1e-5)


def test_cost_vanishes_at_the_reference(robot: RobotParams) -> None:
    """Given x = x_d and u = u0, when evaluating the running cost, then it is zero."""
    x_d = default_state(robot)
    u_0 = equilibrium_input(robot, np.ones(4, dtype=bool))

    cost = build_cost(x_d, robot, CostWeights(), u_0)

    assert cost.state.value(x_d, 0.0) == 0.0
    assert cost.input.value(u_0, 0.0) == 0.0


def test_joint_velocity_cost_is_task_space_weighted(robot: RobotParams) -> None:
    """Given joint velocities on one leg, when costing them, then it is 0.5 w |J u_J|^2."""
    weights = CostWeights()
    cost = build_cost(default_state(robot), robot, weights)
    rates = np.array([0.3, -0.7, 1.1])
    u = np.zeros(INPUT_DIM)
    u[input_joint_velocities(2)] = rates

    jacobian = leg_jacobian(robot.default_joints, 2, robot)
    expected = 0.5 * weights.foot_velocity * float(np.sum((jacobian @ rates) ** 2))
    assert cost.input.value(u, 0.0) == pytest.approx(expected, rel=1e-12)


def test_terminal_cost_ignores_joints(robot: RobotParams) -> None:
    """Given a joint-only perturbation, when evaluating the terminal cost, then it stays zero."""
    x_d = default_state(robot)
    cost = build_cost(x_d, robot, CostWeights())
    perturbed = x_d.copy()
    perturbed[JOINTS] += 0.2

    assert cost.terminal.value(perturbed, 1.0) == 0.0
    base_only = x_d.copy()
    base_only[BASE] += 0.01
    assert cost.terminal.value(base_only, 1.0) > 0.0


def test_negative_weights_are_rejected() -> None:
    """Given a negative state weight, when building weights, then validation fails."""
    with pytest.raises(ValueError, match="nonnegative"):
        CostWeights(position=-1.0)
