"""Operator command: desired base velocity over time."""

import math
from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray


@dataclass(frozen=True)
class CommandProfile:
    """Heading-frame velocity command with an optional forward ramp.

    The forward speed is ``forward_velocity + acceleration * (t - ramp_start)`` after
    ``ramp_start``, saturated at ``max_velocity``.
    """

    forward_velocity: float = 0.0
    lateral_velocity: float = 0.0
    yaw_rate: float = 0.0
    acceleration: float = 0.0
    ramp_start: float = 0.0
    max_velocity: float = math.inf
    base_height: float | None = None  # None keeps the robot's stand height

    def __post_init__(self) -> None:
        if self.acceleration < 0.0:
            raise ValueError(f"ramp acceleration must be nonnegative, got {self.acceleration}")
        if self.ramp_start < 0.0:
            raise ValueError("ramp start must be nonnegative")
        if not self.max_velocity > 0.0:
            raise ValueError("max velocity must be positive")
        if self.base_height is not None and not self.base_height > 0.0:
            raise ValueError("base height must be positive")

    @classmethod
    def ramp(cls, acceleration: float, max_velocity: float = math.inf) -> "CommandProfile":
        return cls(acceleration=acceleration, max_velocity=max_velocity)

    def forward_speed(self, t: float) -> float:
        ramped = self.forward_velocity + self.acceleration * max(t - self.ramp_start, 0.0)
        return min(ramped, self.max_velocity)

    def heading_velocity(self, t: float) -> FloatArray:
        """Desired (forward, lateral, 0) velocity in the heading frame."""
        return np.array([self.forward_speed(t), self.lateral_velocity, 0.0])
