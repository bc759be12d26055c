"""Simulation plant: the kinodynamic skeleton on compliant ground behind lagging actuators."""

import logging
import math

import numpy as np

from loopshaped_mpc.application.services.quadruped_model import (
    eom,
    foot_positions_world,
    foot_velocity,
    rotation_matrix,
)
from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.disturbance import Disturbance
from loopshaped_mpc.domain.models.errors import ChartError, DivergenceError
from loopshaped_mpc.domain.models.kinodynamic import (
    ANGULAR_RATE,
    EULER,
    FORCES,
    INPUT_DIM,
    JOINT_VELOCITIES,
    JOINTS,
    LEG_COUNT,
    LINEAR_VELOCITY,
    POSITION,
)
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.terrain import TerrainModel

logger = logging.getLogger(__name__)

# Largest (contact natural frequency x substep) accepted by the semi-implicit integrator.
_STIFF_STEP = 0.5


def contact_force(
    penetration: float,
    penetration_rate: float,
    tangential_velocity: FloatArray,
    terrain: TerrainModel,
) -> FloatArray:
    """Spring-damper normal force plus viscous friction clamped to the friction cone."""
    if penetration < 0.0:
        raise ValueError(f"penetration must be nonnegative, got {penetration}")
    if penetration == 0.0:
        return np.zeros(3)
    normal_force = max(0.0, terrain.stiffness * penetration + terrain.damping * penetration_rate)
    tangential = -terrain.tangential_damping * np.asarray(tangential_velocity, dtype=float)
    tangential -= (tangential @ terrain.normal) * terrain.normal
    limit = terrain.friction * normal_force
    magnitude = float(np.linalg.norm(tangential))
    if magnitude > limit:
        tangential *= limit / magnitude
    return normal_force * terrain.normal + tangential


class SimulatedPlant:
    """Implements ``PlantProtocol`` for the quadruped.

    Compliant mode resolves spring-damper contact at every foot and integrates with
    semi-implicit Euler on substeps short enough for the ground stiffness. Rigid mode applies the
    lagged commanded forces directly and integrates with RK4, reproducing the planning model.
    """

    def __init__(
        self,
        robot: RobotParams,
        terrain: TerrainModel,
        actuator: ActuatorModel | None = None,
        disturbance: Disturbance | None = None,
    ) -> None:
        self.robot = robot
        self.terrain = terrain
        self.actuator = actuator or ActuatorModel()
        self.disturbance = disturbance or Disturbance.none()

    def substeps(self, dt: float) -> int:
        if self.terrain.rigid:
            return 1
        leg_mass = self.robot.mass / LEG_COUNT
        natural_frequency = math.sqrt(self.terrain.stiffness / leg_mass)
        return max(1, math.ceil(dt * natural_frequency / _STIFF_STEP))

    def step(
        self, plant: PlantState, command: FloatArray | None, dt: float
    ) -> tuple[PlantState, FloatArray]:
        """Advance ``plant`` by ``dt``; returns the next state and the realized ground forces.

        Raises:
            DivergenceError: If the state becomes non-finite or leaves the Euler chart.
        """
        if not dt > 0.0:
            raise ValueError(f"plant step must be positive, got {dt}")
        target = np.zeros(INPUT_DIM) if command is None else np.asarray(command, dtype=float)
        count = self.substeps(dt)
        h = dt / count
        lag = self.actuator.lag_factor(h)

        state = np.array(plant.state)
        lagged = np.array(plant.lagged_inputs)
        extension = np.array(plant.leg_extension)
        contact = np.array(plant.contact)
        penetration = np.array(plant.penetration)
        forces = np.zeros(3 * LEG_COUNT)
        t = plant.time
        try:
            for _ in range(count):
                lagged += lag * (target - lagged)
                if self.terrain.rigid:
                    state, forces, contact = self._rigid_substep(state, lagged, t, h)
                    penetration = np.zeros(LEG_COUNT)
                else:
                    state, forces, contact, penetration, extension = self._compliant_substep(
                        state, lagged, extension, t, h
                    )
                t += h
        except ChartError as exc:
            raise DivergenceError(f"plant left the Euler chart at t={t:.4f}", time=t) from exc
        if not np.all(np.isfinite(state)):
            raise DivergenceError(f"non-finite plant state at t={t:.4f}", time=t)

        next_plant = PlantState(
            time=plant.time + dt,
            state=state,
            contact=contact,
            penetration=np.where(contact, penetration, 0.0),
            lagged_inputs=lagged,
            leg_extension=extension,
        )
        return next_plant, forces

    def _external_acceleration(self, state: FloatArray, t: float) -> FloatArray:
        """Body-frame linear acceleration of the disturbance force."""
        push = self.disturbance.force_at(t)
        if not np.any(push):
            return np.zeros(3)
        return rotation_matrix(state[EULER]).T @ push / self.robot.mass

    def _rigid_substep(
        self, state: FloatArray, lagged: FloatArray, t: float, h: float
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        def derivative(x: FloatArray, s: float) -> FloatArray:
            rate = eom(x, lagged, self.robot)
            rate[LINEAR_VELOCITY] += self._external_acceleration(x, s)
            return rate

        k1 = derivative(state, t)
        k2 = derivative(state + 0.5 * h * k1, t + 0.5 * h)
        k3 = derivative(state + 0.5 * h * k2, t + 0.5 * h)
        k4 = derivative(state + h * k3, t + h)
        forces = np.array(lagged[FORCES])
        normal_forces = forces.reshape(LEG_COUNT, 3) @ self.terrain.normal
        return state + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), forces, normal_forces > 0.0

    def _compliant_substep(
        self, state: FloatArray, lagged: FloatArray, extension: FloatArray, t: float, h: float
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray, FloatArray]:
        terrain = self.terrain
        normal = terrain.normal
        feet = foot_positions_world(state, self.robot) - extension[:, None] * normal
        velocities = foot_velocity(state, lagged, self.robot)

        commanded_normal = lagged[FORCES].reshape(LEG_COUNT, 3) @ normal
        ground = np.array([0.0, 0.0, terrain.height])
        depth = -((feet - ground) @ normal)
        contact = depth > 0.0
        penetration = np.where(contact, depth, 0.0)

        forces = np.zeros((LEG_COUNT, 3))
        extension_rate = np.empty(LEG_COUNT)
        for leg in range(LEG_COUNT):
            if not contact[leg]:
                extension_rate[leg] = -extension[leg] / self.actuator.extension_decay
                continue
            # Implicit in the extension: the spring force seen at the end of the substep.
            admittance = self.actuator.force_admittance
            spring_force = terrain.stiffness * penetration[leg]
            extension_rate[leg] = (
                admittance
                * (commanded_normal[leg] - spring_force)
                / (1.0 + h * admittance * terrain.stiffness)
            )
            foot_rate = velocities[leg] - extension_rate[leg] * normal
            normal_rate = float(foot_rate @ normal)
            tangential = foot_rate - normal_rate * normal
            forces[leg] = contact_force(float(penetration[leg]), -normal_rate, tangential, terrain)

        realized = np.concatenate([forces.reshape(-1), lagged[JOINT_VELOCITIES]])
        rate = eom(state, realized, self.robot)
        rate[LINEAR_VELOCITY] += self._external_acceleration(state, t)

        next_state = np.array(state)
        next_state[ANGULAR_RATE] += h * rate[ANGULAR_RATE]
        next_state[LINEAR_VELOCITY] += h * rate[LINEAR_VELOCITY]
        # Positions use the updated velocities.
        settled = eom(next_state, realized, self.robot)
        next_state[EULER] += h * settled[EULER]
        next_state[POSITION] += h * settled[POSITION]
        next_state[JOINTS] += h * lagged[JOINT_VELOCITIES]
        return (
            next_state,
            forces.reshape(-1),
            contact,
            penetration,
            extension + h * extension_rate,
        )
