"""Protocol for a simulated plant."""

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from loopshaped_mpc.domain.models.arrays import FloatArray
    from loopshaped_mpc.domain.models.plant_state import PlantState


class PlantProtocol(Protocol):
    """Advances a plant state under a command (forces and joint velocities, 24 entries)."""

    def step(
        self, plant: "PlantState", command: "FloatArray | None", dt: float
    ) -> tuple["PlantState", "FloatArray"]:
        """Integrate the plant over ``dt``.

        Args:
            plant: Current plant state.
            command: Commanded input, or None for passive actuators.
            dt: Step length in seconds.

        Returns:
            The next plant state and the realized world-frame contact forces (12 entries).
        """
        ...
