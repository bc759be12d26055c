"""Plan tracker standing in for a whole-body controller.

Forces follow the plan plus a CoM pose/twist correction shared by the stance feet; joint
velocities follow the plan plus a swing-foot position correction through the leg Jacobian.
"""

import logging
from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.application.services.friction_cone import project_to_cone
from loopshaped_mpc.application.services.gait_planner import cone_set
from loopshaped_mpc.application.services.loopshaping import (
    propagate_filter_state,
    recover_input,
)
from loopshaped_mpc.application.services.quadruped_model import (
    forward_kinematics,
    is_near_singular,
    leg_jacobians,
    rotation_matrix,
    skew,
)
from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray
from loopshaped_mpc.domain.models.errors import PlanExpiredError
from loopshaped_mpc.domain.models.gait import GaitSchedule
from loopshaped_mpc.domain.models.kinodynamic import (
    ANGULAR_RATE,
    EULER,
    FORCES,
    JOINT_VELOCITIES,
    JOINTS,
    LEG_COUNT,
    LINEAR_VELOCITY,
    POSITION,
    input_joint_velocities,
    leg_joints,
)
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.tracker_gains import TrackerGains

logger = logging.getLogger(__name__)

DLS_DAMPING = 1e-2
_PLAN_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class TrackerCommand:
    """Plant command together with the recovered plan input it was derived from."""

    command: FloatArray
    planned_input: FloatArray
    stance: BoolArray
    dls_fallback: bool = False


def _solve_leg(jacobian: FloatArray, foot_rate: FloatArray) -> tuple[FloatArray, bool]:
    """Joint rates producing ``foot_rate``; damped least squares near a singularity."""
    if is_near_singular(jacobian):
        damped = jacobian @ jacobian.T + DLS_DAMPING**2 * np.eye(3)
        return jacobian.T @ np.linalg.solve(damped, foot_rate), True
    return np.linalg.solve(jacobian, foot_rate), False


class TrackingController:
    def __init__(self, robot: RobotParams, gait: GaitSchedule, gains: TrackerGains) -> None:
        self.robot = robot
        self.gait = gait
        self.gains = gains

    def planned_input(
        self, snapshot: PlanSnapshot, filter_state: FloatArray, t: float
    ) -> FloatArray:
        """u = C_s x_s + D_s nu with the tracker's own filter state and the planned nu."""
        self._check_coverage(snapshot, t)
        return recover_input(snapshot.bank, filter_state, snapshot.auxiliary_input_at(t))

    def advance_filter(
        self, snapshot: PlanSnapshot, filter_state: FloatArray, t: float, dt: float
    ) -> FloatArray:
        self._check_coverage(snapshot, t + dt)
        return propagate_filter_state(snapshot.bank, filter_state, snapshot.trajectory, t, dt)

    def _check_coverage(self, snapshot: PlanSnapshot, t: float) -> None:
        if t > snapshot.end_time + _PLAN_EPS or t < snapshot.start_time - _PLAN_EPS:
            raise PlanExpiredError(
                f"plan covers [{snapshot.start_time:.4f}, {snapshot.end_time:.4f}], "
                f"tracker is at t={t:.4f}"
            )

    def command(
        self, snapshot: PlanSnapshot, plant: PlantState, filter_state: FloatArray
    ) -> TrackerCommand:
        """Plant command at the plant's time.

        Raises:
            PlanExpiredError: If the plant time lies outside the plan.
        """
        t = plant.time
        planned = self.planned_input(snapshot, filter_state, t)
        desired = snapshot.robot_state_at(t)
        measured = plant.state
        stance, normal, friction = cone_set(self.gait, t)

        forces = self.gains.force_feedforward_weight * planned[FORCES].reshape(LEG_COUNT, 3)
        forces += self._base_correction(desired, measured, stance)
        clamped = project_to_cone(forces, normal, friction)
        forces = np.where(stance[:, None], clamped, 0.0)

        joint_rates, fallback = self._swing_correction(desired, measured, planned, plant, stance)
        command = np.concatenate([forces.reshape(-1), planned[JOINT_VELOCITIES] + joint_rates])
        return TrackerCommand(
            command=command, planned_input=planned, stance=stance, dls_fallback=fallback
        )

    def _base_correction(
        self, desired: FloatArray, measured: FloatArray, stance: BoolArray
    ) -> FloatArray:
        """World-frame force per foot realizing the CoM PD wrench."""
        correction = np.zeros((LEG_COUNT, 3))
        count = int(stance.sum())
        if count == 0:
            return correction
        gains = self.gains
        rotation = rotation_matrix(measured[EULER])
        desired_rotation = rotation_matrix(desired[EULER])
        force = gains.position_kp * (desired[POSITION] - measured[POSITION]) + gains.velocity_kd * (
            desired_rotation @ desired[LINEAR_VELOCITY] - rotation @ measured[LINEAR_VELOCITY]
        )
        torque_body = gains.orientation_kp * (
            desired[EULER] - measured[EULER]
        ) + gains.angular_rate_kd * (desired[ANGULAR_RATE] - measured[ANGULAR_RATE])
        correction[stance] = force / count
        if not np.any(torque_body):
            return correction

        # Minimum-norm stance forces producing the torque about the CoM.
        feet = forward_kinematics(measured[JOINTS], self.robot) @ rotation.T
        legs = np.flatnonzero(stance)
        moment_arms = np.hstack([skew(feet[leg]) for leg in legs])
        shares = np.linalg.pinv(moment_arms, rcond=1e-6) @ (rotation @ torque_body)
        correction[legs] += shares.reshape(len(legs), 3)
        return correction

    def _swing_correction(
        self,
        desired: FloatArray,
        measured: FloatArray,
        planned: FloatArray,
        plant: PlantState,
        stance: BoolArray,
    ) -> tuple[FloatArray, bool]:
        gains = self.gains
        rates = np.zeros(3 * LEG_COUNT)
        if stance.all() or (gains.swing_kp == 0.0 and gains.swing_kd == 0.0):
            return rates, False
        desired_feet = forward_kinematics(desired[JOINTS], self.robot)
        measured_feet = forward_kinematics(measured[JOINTS], self.robot)
        desired_jacobians = leg_jacobians(desired[JOINTS], self.robot)
        jacobians = leg_jacobians(measured[JOINTS], self.robot)
        fallback = False
        for leg in map(int, np.flatnonzero(~stance)):
            joint_slice = input_joint_velocities(leg)
            velocity_error = (
                desired_jacobians[leg] @ planned[joint_slice]
                - jacobians[leg] @ plant.lagged_inputs[joint_slice]
            )
            foot_rate = gains.swing_kp * (
                desired_feet[leg] - measured_feet[leg]
            ) + gains.swing_kd * velocity_error
            if not np.any(foot_rate):
                continue
            leg_rates, damped = _solve_leg(jacobians[leg], foot_rate)
            if damped:
                logger.warning(f"Leg {leg} near singular, damped least-squares swing correction")
            fallback = fallback or damped
            rates[leg_joints(leg)] = leg_rates
        return rates, fallback
