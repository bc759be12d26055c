"""State of the simulation plant."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError
from loopshaped_mpc.domain.models.kinodynamic import INPUT_DIM, LEG_COUNT, STATE_DIM, KinodynState


@dataclass(frozen=True, eq=False)
class PlantState:
    """Kinodynamic state plus contact and actuator internal states.

    ``lagged_inputs`` is the actuator output (forces and joint velocities) after the first-order
    lag; ``leg_extension`` is the admittance displacement of each foot along the ground normal.
    """

    time: float
    state: FloatArray
    contact: BoolArray
    penetration: FloatArray
    lagged_inputs: FloatArray
    leg_extension: FloatArray

    def __post_init__(self) -> None:
        state = frozen_array(self.state)
        contact = frozen_array(self.contact, dtype=np.bool_)
        penetration = frozen_array(self.penetration)
        lagged = frozen_array(self.lagged_inputs)
        extension = frozen_array(self.leg_extension)

        if state.shape != (STATE_DIM,):
            raise DimensionMismatchError(f"plant state must have {STATE_DIM} entries")
        if contact.shape != (LEG_COUNT,) or penetration.shape != (LEG_COUNT,):
            raise DimensionMismatchError("one contact flag and penetration per leg")
        if lagged.shape != (INPUT_DIM,) or extension.shape != (LEG_COUNT,):
            raise DimensionMismatchError("actuator state dimensions disagree with the model")
        if np.any(penetration < 0.0) or np.any(penetration[~contact] != 0.0):
            raise ValueError("penetration must be nonnegative in contact and zero otherwise")

        object.__setattr__(self, "state", state)
        object.__setattr__(self, "contact", contact)
        object.__setattr__(self, "penetration", penetration)
        object.__setattr__(self, "lagged_inputs", lagged)
        object.__setattr__(self, "leg_extension", extension)

    @classmethod
    def initial(cls, state: FloatArray, lagged_inputs: FloatArray | None = None) -> "PlantState":
        """A plant at t = 0 with no contact yet resolved and the actuators at ``lagged_inputs``."""
        return cls(
            time=0.0,
            state=state,
            contact=np.zeros(LEG_COUNT, dtype=bool),
            penetration=np.zeros(LEG_COUNT),
            lagged_inputs=np.zeros(INPUT_DIM) if lagged_inputs is None else lagged_inputs,
            leg_extension=np.zeros(LEG_COUNT),
        )

    def kinodyn_state(self) -> KinodynState:
        return KinodynState.from_vector(self.state)

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.state)))
