"""Assembly of the quadruped tracking OCP for one planning horizon."""

import logging

import numpy as np

from loopshaped_mpc.application.services.friction_cone import project_to_cone
from loopshaped_mpc.application.services.gait_planner import mode_constraints, stance_mask
from loopshaped_mpc.application.services.quadruped_model import (
    BaseReference,
    build_cost,
    eom,
    eom_jacobian,
    equilibrium_input,
)
from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.kinodynamic import FORCES, INPUT_DIM, LEG_COUNT, STATE_DIM
from loopshaped_mpc.domain.models.ocp import OcpDefinition
from loopshaped_mpc.domain.models.scenario import Scenario

logger = logging.getLogger(__name__)


class QuadrupedProblem:
    """Builds receding-horizon OCPs for a scenario.

    References are tabulated on the node grid of every horizon; costs look them up by node.
    """

    def __init__(self, scenario: Scenario, reference: BaseReference | None = None) -> None:
        self._scenario = scenario
        self._reference = reference or BaseReference(
            scenario.command,
            scenario.robot,
            origin=np.zeros(3),
            height=scenario.base_height,
        )

    @property
    def reference(self) -> BaseReference:
        return self._reference

    def equilibrium(self, t: float) -> FloatArray:
        """Input balancing gravity over the legs in stance at ``t``, zero if none are."""
        stance = stance_mask(self._scenario.gait, t)
        if not stance.any():
            return np.zeros(INPUT_DIM)
        return equilibrium_input(self._scenario.robot, stance)

    def project_input(self, x: FloatArray, u: FloatArray, t: float) -> FloatArray:
        """Clamp stance forces into the friction cone and zero the swing forces."""
        gait = self._scenario.gait
        stance = stance_mask(gait, t)
        projected = np.array(u, dtype=float)
        forces = projected[FORCES].reshape(LEG_COUNT, 3)
        clamped = project_to_cone(forces, gait.normal, gait.friction)
        projected[FORCES] = np.where(stance[:, None], clamped, 0.0).reshape(-1)
        return projected

    def build(self, start_time: float) -> OcpDefinition:
        scenario = self._scenario
        rates = scenario.rates
        params = scenario.robot
        dt = rates.plan_dt
        times = start_time + dt * np.arange(rates.node_count + 1)
        states = self._reference.states(times)
        inputs = np.stack([self.equilibrium(float(t)) for t in times])

        def node(t: float) -> int:
            return min(max(round((t - start_time) / dt), 0), rates.node_count)

        cost = build_cost(
            lambda t: states[node(t)],
            params,
            scenario.weights,
            lambda t: inputs[node(t)],
        )
        logger.debug(f"Built quadruped OCP at t={start_time:.3f} over {rates.horizon} s")
        return OcpDefinition(
            state_dim=STATE_DIM,
            input_dim=INPUT_DIM,
            dynamics=lambda x, u, t: eom(x, u, params),
            state_cost=cost.state,
            input_cost=cost.input,
            terminal_cost=cost.terminal,
            horizon=rates.horizon,
            node_count=rates.node_count,
            start_time=start_time,
            equality_constraints=lambda x, u, t: mode_constraints(
                x, u, t, scenario.gait, scenario.swing, params
            ),
            input_projection=self.project_input,
            dynamics_jacobian=lambda x, u, t: eom_jacobian(x, u, params),
            initial_input=self.equilibrium,
            vectorized=True,
        )
