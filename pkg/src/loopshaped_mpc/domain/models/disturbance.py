"""External push applied to the simulated base."""

import math
from dataclasses import dataclass, field

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array


@dataclass(frozen=True, eq=False)
class Disturbance:
    """Constant world-frame force on the CoM during [start, start + duration)."""

    start: float = math.inf
    duration: float = 0.0
    force: FloatArray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        force = frozen_array(self.force)
        if force.shape != (3,):
            raise ValueError("disturbance force must be a 3-vector")
        if self.duration < 0.0:
            raise ValueError("disturbance duration must be nonnegative")
        object.__setattr__(self, "force", force)

    @classmethod
    def none(cls) -> "Disturbance":
        return cls()

    def force_at(self, t: float) -> FloatArray:
        if self.start <= t < self.start + self.duration:
            return np.array(self.force)
        return np.zeros(3)
