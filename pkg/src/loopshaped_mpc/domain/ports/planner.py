"""Planner port."""

from typing import Protocol

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState


class Planner(Protocol):
    """Port for producing a plan from the latest measurement."""

    def plan(self, plant: PlantState, filter_state: FloatArray) -> PlanSnapshot:
        """Solve the receding-horizon problem starting at the measured state.

        Args:
            plant: Measured plant state; its time is the start of the horizon.
            filter_state: Shaping-filter state held by the tracker.

        Returns:
            The new plan.
        """
        ...
