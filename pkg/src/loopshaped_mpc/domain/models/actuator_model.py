"""Actuator bandwidth and compliance model of the simulation plant."""

import math
from dataclasses import dataclass

# 90 % rise time of about 35 ms for a first-order lag.
DEFAULT_TIME_CONSTANT = 0.0152


@dataclass(frozen=True)
class ActuatorModel:
    """First-order lag on commanded forces and joint velocities, plus stance-leg admittance.

    A stance leg extends along the ground normal at ``force_admittance * (f_cmd - f_ground)``
    (m/s per N) so that its ground force follows the commanded normal force on compliant ground.
    Out of contact the extension relaxes to zero with ``extension_decay``.
    """

    time_constant: float = DEFAULT_TIME_CONSTANT
    force_admittance: float = 2e-3
    extension_decay: float = 0.02

    def __post_init__(self) -> None:
        if self.time_constant < 0.0:
            raise ValueError(
                f"actuator time constant must be nonnegative, got {self.time_constant}"
            )
        if self.force_admittance < 0.0:
            raise ValueError("force admittance must be nonnegative")
        if not self.extension_decay > 0.0:
            raise ValueError("extension decay time must be positive")

    @classmethod
    def ideal(cls) -> "ActuatorModel":
        """No lag and no admittance: commands are realized instantly."""
        return cls(time_constant=0.0, force_admittance=0.0)

    def lag_factor(self, dt: float) -> float:
        """Fraction of the remaining command error removed over ``dt`` (exact exponential)."""
        if self.time_constant == 0.0:
            return 1.0
        return -math.expm1(-dt / self.time_constant)

    def rise_time(self) -> float:
        """Time to 90 % of a step command."""
        return self.time_constant * math.log(10.0)
