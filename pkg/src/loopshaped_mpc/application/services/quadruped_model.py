"""Kinodynamic quadruped model: base rigid body driven by foot forces, legs by joint velocities.

All functions accept stacked arguments; the leading axes are broadcast. Forces are world-frame,
foot positions are relative to the CoM in body frame unless stated otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import block_diag

from loopshaped_mpc.application.services.costs import (
    QuadraticInputCost,
    QuadraticStateCost,
    Reference,
)
from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray
from loopshaped_mpc.domain.models.command_profile import CommandProfile
from loopshaped_mpc.domain.models.cost_weights import CostWeights
from loopshaped_mpc.domain.models.errors import ChartError
from loopshaped_mpc.domain.models.kinodynamic import (
    ANGULAR_RATE,
    BASE,
    CHART_MARGIN,
    EULER,
    FORCES,
    INPUT_DIM,
    JOINT_VELOCITIES,
    JOINTS,
    LEG_COUNT,
    LINEAR_VELOCITY,
    POSITION,
    STATE_DIM,
    input_force,
    state_joints,
)
from loopshaped_mpc.domain.models.robot_params import LATERAL_SIGNS, RobotParams


# Legs whose Jacobian condition number exceeds this are treated as stretched.
SINGULAR_CONDITION = 1e6

_UNIT = np.eye(3)


def skew(v: FloatArray) -> FloatArray:
    """Cross-product matrix [v]x, stacked over leading axes."""
    v = np.asarray(v, dtype=float)
    zero = np.zeros(v.shape[:-1])
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    return np.stack(
        [
            np.stack([zero, -z, y], axis=-1),
            np.stack([z, zero, -x], axis=-1),
            np.stack([-y, x, zero], axis=-1),
        ],
        axis=-2,
    )


def _check_pitch(euler: FloatArray) -> None:
    if np.any(np.abs(euler[..., 1]) >= math.pi / 2.0 - CHART_MARGIN):
        raise ChartError("pitch reached the Euler-angle singularity")


def _axis_rotations(euler: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
    roll, pitch, yaw = euler[..., 0], euler[..., 1], euler[..., 2]
    one, zero = np.ones_like(roll), np.zeros_like(roll)

    def rotation(rows: list[list[FloatArray]]) -> FloatArray:
        return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)

    cr, sr, cp, sp, cy, sy = (
        np.cos(roll),
        np.sin(roll),
        np.cos(pitch),
        np.sin(pitch),
        np.cos(yaw),
        np.sin(yaw),
    )
    rx = rotation([[one, zero, zero], [zero, cr, -sr], [zero, sr, cr]])
    ry = rotation([[cp, zero, sp], [zero, one, zero], [-sp, zero, cp]])
    rz = rotation([[cy, -sy, zero], [sy, cy, zero], [zero, zero, one]])
    return rx, ry, rz


def rotation_matrix(euler: FloatArray) -> FloatArray:
    """Body-to-world rotation R = Rz(yaw) Ry(pitch) Rx(roll)."""
    rx, ry, rz = _axis_rotations(np.asarray(euler, dtype=float))
    return rz @ ry @ rx


def rotation_derivatives(euler: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
    """dR/droll, dR/dpitch, dR/dyaw at a single orientation."""
    rx, ry, rz = _axis_rotations(np.asarray(euler, dtype=float))
    rotation = rz @ ry @ rx
    return (
        rotation @ skew(_UNIT[0]),
        rz @ ry @ skew(_UNIT[1]) @ rx,
        skew(_UNIT[2]) @ rotation,
    )


def euler_rate_matrix(euler: FloatArray) -> FloatArray:
    """T(theta) with d(euler)/dt = T(theta) omega for the body angular rate omega."""
    euler = np.asarray(euler, dtype=float)
    roll, pitch = euler[..., 0], euler[..., 1]
    sr, cr, tp, cp = np.sin(roll), np.cos(roll), np.tan(pitch), np.cos(pitch)
    one, zero = np.ones_like(roll), np.zeros_like(roll)
    rows = [[one, sr * tp, cr * tp], [zero, cr, -sr], [zero, sr / cp, cr / cp]]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def _euler_rate_derivatives(euler: FloatArray) -> tuple[FloatArray, FloatArray]:
    roll, pitch = float(euler[0]), float(euler[1])
    sr, cr, tp, cp = math.sin(roll), math.cos(roll), math.tan(pitch), math.cos(pitch)
    d_roll = np.array([[0.0, cr * tp, -sr * tp], [0.0, -sr, -cr], [0.0, cr / cp, -sr / cp]])
    d_pitch = np.array(
        [[0.0, sr / cp**2, cr / cp**2], [0.0, 0.0, 0.0], [0.0, sr * tp / cp, cr * tp / cp]]
    )
    return d_roll, d_pitch


def _leg_geometry(params: RobotParams) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    lengths = params.link_lengths
    return (
        np.asarray(LATERAL_SIGNS) * lengths[:, 0],
        lengths[:, 1],
        lengths[:, 2],
        params.hip_offsets,
    )


def forward_kinematics(q: FloatArray, params: RobotParams) -> FloatArray:
    """Foot positions relative to the CoM in body frame, shape (..., 4, 3)."""
    q = np.asarray(q, dtype=float).reshape(*np.shape(q)[:-1], LEG_COUNT, 3)
    lateral, thigh, shank, hips = _leg_geometry(params)
    q0, q1, q2 = q[..., 0], q[..., 1], q[..., 2]
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    px = -thigh * s1 - shank * s12
    py = np.broadcast_to(lateral, px.shape)
    pz = -thigh * c1 - shank * c12
    c0, s0 = np.cos(q0), np.sin(q0)
    return hips + np.stack([px, c0 * py - s0 * pz, s0 * py + c0 * pz], axis=-1)


def leg_jacobians(q: FloatArray, params: RobotParams) -> FloatArray:
    """d(foot position)/d(leg joints) in body frame, shape (..., 4, 3, 3)."""
    q = np.asarray(q, dtype=float).reshape(*np.shape(q)[:-1], LEG_COUNT, 3)
    lateral, thigh, shank, _ = _leg_geometry(params)
    q0, q1, q2 = q[..., 0], q[..., 1], q[..., 2]
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    c0, s0 = np.cos(q0), np.sin(q0)
    py = np.broadcast_to(lateral, q0.shape)
    pz = -thigh * c1 - shank * c12
    zero = np.zeros_like(q0)

    d_abduction = np.stack([zero, -s0 * py - c0 * pz, c0 * py - s0 * pz], axis=-1)

    def rotated(dx: FloatArray, dz: FloatArray) -> FloatArray:
        return np.stack([dx, -s0 * dz, c0 * dz], axis=-1)

    d_hip = rotated(-thigh * c1 - shank * c12, thigh * s1 + shank * s12)
    d_knee = rotated(-shank * c12, shank * s12)
    return np.stack([d_abduction, d_hip, d_knee], axis=-1)


def leg_jacobian(q: FloatArray, leg: int, params: RobotParams) -> FloatArray:
    return leg_jacobians(q, params)[..., leg, :, :]


def is_near_singular(jacobian: FloatArray) -> bool:
    return bool(np.linalg.cond(jacobian) > SINGULAR_CONDITION)


def foot_positions_world(x: FloatArray, params: RobotParams) -> FloatArray:
    """World-frame foot positions, shape (..., 4, 3)."""
    x = np.asarray(x, dtype=float)
    rotation = rotation_matrix(x[..., EULER])
    feet = forward_kinematics(x[..., JOINTS], params)
    return x[..., None, POSITION] + np.einsum("...ij,...lj->...li", rotation, feet)


def foot_velocity(x: FloatArray, u: FloatArray, params: RobotParams) -> FloatArray:
    """World-frame foot velocities R (v + omega x r + J u_J), shape (..., 4, 3)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    _check_pitch(x[..., EULER])
    rotation = rotation_matrix(x[..., EULER])
    feet = forward_kinematics(x[..., JOINTS], params)
    jacobians = leg_jacobians(x[..., JOINTS], params)
    joint_rates = u[..., JOINT_VELOCITIES].reshape(*u.shape[:-1], LEG_COUNT, 3)
    body = (
        x[..., None, LINEAR_VELOCITY]
        + np.cross(x[..., None, ANGULAR_RATE], feet)
        + np.einsum("...lij,...lj->...li", jacobians, joint_rates)
    )
    return np.einsum("...ij,...lj->...li", rotation, body)


def eom(x: FloatArray, u: FloatArray, params: RobotParams) -> FloatArray:
    """State derivative of the kinodynamic model.

    Raises:
        ChartError: If the pitch is at the Euler-angle singularity.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    euler = x[..., EULER]
    _check_pitch(euler)
    omega = x[..., ANGULAR_RATE]
    velocity = x[..., LINEAR_VELOCITY]
    rotation = rotation_matrix(euler)
    forces = u[..., FORCES].reshape(*u.shape[:-1], LEG_COUNT, 3)
    body_forces = np.einsum("...ji,...lj->...li", rotation, forces)
    feet = forward_kinematics(x[..., JOINTS], params)

    gravity = np.array([0.0, 0.0, -params.gravity])
    inertia = params.inertia
    momentum = omega @ inertia.T
    torque = np.cross(feet, body_forces).sum(axis=-2) - np.cross(omega, momentum)

    euler_rates = np.einsum("...ij,...j->...i", euler_rate_matrix(euler), omega)
    position_rates = np.einsum("...ij,...j->...i", rotation, velocity)
    angular_acceleration = torque @ np.linalg.inv(inertia).T
    linear_acceleration = (
        np.einsum("...ji,j->...i", rotation, gravity) + body_forces.sum(axis=-2) / params.mass
    )
    return np.concatenate(
        [
            euler_rates,
            position_rates,
            angular_acceleration,
            linear_acceleration,
            u[..., JOINT_VELOCITIES],
        ],
        axis=-1,
    )


def eom_jacobian(
    x: FloatArray, u: FloatArray, params: RobotParams
) -> tuple[FloatArray, FloatArray]:
    """Analytic d(eom)/dx and d(eom)/du at a single point."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    euler = x[EULER]
    _check_pitch(euler)
    omega, velocity = x[ANGULAR_RATE], x[LINEAR_VELOCITY]
    rotation = rotation_matrix(euler)
    derivatives = rotation_derivatives(euler)
    forces = u[FORCES].reshape(LEG_COUNT, 3)
    body_forces = forces @ rotation
    feet = forward_kinematics(x[JOINTS], params)
    jacobians = leg_jacobians(x[JOINTS], params)
    inertia = params.inertia
    inertia_inv = np.linalg.inv(inertia)
    gravity = np.array([0.0, 0.0, -params.gravity])
    total_force = forces.sum(axis=0)

    a = np.zeros((STATE_DIM, STATE_DIM))
    b = np.zeros((STATE_DIM, INPUT_DIM))

    d_roll, d_pitch = _euler_rate_derivatives(euler)
    a[EULER, 0] = d_roll @ omega
    a[EULER, 1] = d_pitch @ omega
    a[EULER, ANGULAR_RATE] = euler_rate_matrix(euler)

    for axis, d_rotation in enumerate(derivatives):
        a[POSITION, axis] = d_rotation @ velocity
        d_body_forces = forces @ d_rotation
        a[ANGULAR_RATE, axis] = inertia_inv @ np.cross(feet, d_body_forces).sum(axis=0)
        a[LINEAR_VELOCITY, axis] = d_rotation.T @ (gravity + total_force / params.mass)
    a[POSITION, LINEAR_VELOCITY] = rotation
    a[ANGULAR_RATE, ANGULAR_RATE] = inertia_inv @ (-skew(omega) @ inertia + skew(inertia @ omega))

    for leg in range(LEG_COUNT):
        a[ANGULAR_RATE, state_joints(leg)] = inertia_inv @ (
            -skew(body_forces[leg]) @ jacobians[leg]
        )
        b[ANGULAR_RATE, input_force(leg)] = inertia_inv @ skew(feet[leg]) @ rotation.T
        b[LINEAR_VELOCITY, input_force(leg)] = rotation.T / params.mass
    b[JOINTS, JOINT_VELOCITIES] = np.eye(3 * LEG_COUNT)
    return a, b


def equilibrium_input(params: RobotParams, stance: BoolArray) -> FloatArray:
    """Input holding the robot still: stance feet share the weight along world z.

    Raises:
        ValueError: If no leg is in stance.
    """
    stance = np.asarray(stance, dtype=bool)
    count = int(stance.sum())
    if count == 0:
        raise ValueError("an equilibrium input needs at least one stance leg")
    u = np.zeros(INPUT_DIM)
    for leg in np.flatnonzero(stance):
        u[input_force(int(leg))][2] = params.weight / count
    return u


def default_state(params: RobotParams, height: float | None = None) -> FloatArray:
    """Level base at ``height`` (default the stand height) in the default joint configuration."""
    x = np.zeros(STATE_DIM)
    x[POSITION][2] = params.stand_height if height is None else height
    x[JOINTS] = params.default_joints
    return x


class BaseReference:
    """Desired state trajectory from a velocity command, anchored at the episode start.

    Roll and pitch are level, yaw follows the commanded rate, the horizontal position integrates
    the commanded heading-frame velocity and the joints stay at the default configuration.
    """

    def __init__(
        self,
        command: CommandProfile,
        params: RobotParams,
        origin: FloatArray,
        origin_yaw: float = 0.0,
        height: float | None = None,
        resolution: float = 1e-3,
    ) -> None:
        self._command = command
        self._params = params
        self._origin = np.asarray(origin, dtype=float)
        self._origin_yaw = origin_yaw
        self._height = params.stand_height if height is None else height
        self._resolution = resolution
        self._grid = np.zeros(1)
        self._displacement = np.zeros((1, 2))

    def _forward_speeds(self, times: FloatArray) -> FloatArray:
        command = self._command
        ramped = command.forward_velocity + command.acceleration * np.maximum(
            times - command.ramp_start, 0.0
        )
        return np.minimum(ramped, command.max_velocity)

    def _extend(self, t_max: float) -> None:
        if t_max <= self._grid[-1]:
            return
        count = math.ceil((t_max + 1.0) / self._resolution) + 2
        grid = self._resolution * np.arange(count)
        yaw = self._origin_yaw + self._command.yaw_rate * grid
        forward = self._forward_speeds(grid)
        lateral = self._command.lateral_velocity
        world = np.stack(
            [
                np.cos(yaw) * forward - np.sin(yaw) * lateral,
                np.sin(yaw) * forward + np.cos(yaw) * lateral,
            ],
            axis=-1,
        )
        self._grid = grid
        self._displacement = cumulative_trapezoid(world, grid, axis=0, initial=0.0)

    def states(self, times: FloatArray) -> FloatArray:
        """Desired states at ``times``, shape (len(times), 24)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        self._extend(float(times.max()))
        reference = np.zeros((times.size, STATE_DIM))
        reference[:, 2] = self._origin_yaw + self._command.yaw_rate * times
        reference[:, 3] = self._origin[0] + np.interp(times, self._grid, self._displacement[:, 0])
        reference[:, 4] = self._origin[1] + np.interp(times, self._grid, self._displacement[:, 1])
        reference[:, 5] = self._height
        reference[:, 8] = self._command.yaw_rate
        reference[:, 9] = self._forward_speeds(times)
        reference[:, 10] = self._command.lateral_velocity
        reference[:, JOINTS] = self._params.default_joints
        return reference


def state_weight(weights: CostWeights) -> FloatArray:
    return np.diag(
        np.concatenate(
            [
                np.full(3, weights.orientation),
                np.full(3, weights.position),
                np.full(3, weights.angular_rate),
                np.full(3, weights.linear_velocity),
                np.full(12, weights.joints),
            ]
        )
    )


def input_weight(weights: CostWeights, params: RobotParams) -> FloatArray:
    """Force block w_f I and, per leg, J^T W J at the default configuration."""
    jacobians = leg_jacobians(params.default_joints, params)
    task_weight = weights.foot_velocity * np.eye(3)
    joint_blocks = [jacobians[leg].T @ task_weight @ jacobians[leg] for leg in range(LEG_COUNT)]
    return block_diag(weights.force * np.eye(3 * LEG_COUNT), *joint_blocks)


def terminal_weight(weights: CostWeights) -> FloatArray:
    """Scaled state weight restricted to the base pose and twist."""
    weight = weights.terminal_scale * state_weight(weights)
    mask = np.zeros(STATE_DIM)
    mask[BASE] = 1.0
    return weight * mask[:, None] * mask[None, :]


@dataclass(frozen=True)
class QuadrupedCost:
    """Running state, running input and terminal cost of the tracking problem."""

    state: QuadraticStateCost
    input: QuadraticInputCost
    terminal: QuadraticStateCost


def build_cost(
    state_reference: Reference,
    params: RobotParams,
    weights: CostWeights,
    input_reference: Reference | None = None,
) -> QuadrupedCost:
    """Quadratic tracking cost about the desired state and the equilibrium input.

    Raises:
        ValueError: If a weight block is not positive semidefinite.
    """
    return QuadrupedCost(
        state=QuadraticStateCost(state_weight(weights), state_reference),
        input=QuadraticInputCost(input_weight(weights, params), input_reference),
        terminal=QuadraticStateCost(terminal_weight(weights), state_reference),
    )
