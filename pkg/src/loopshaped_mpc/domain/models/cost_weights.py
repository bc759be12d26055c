"""Weights of the quadruped tracking cost."""

from dataclasses import dataclass


@dataclass(frozen=True)
class CostWeights:
    """Diagonal weights of the base/joint tracking cost.

    ``foot_velocity`` weighs the task-space foot velocity produced by the joint velocities, so
    the joint-velocity block of the input weight is J^T W J at the default configuration.
    """

    orientation: float = 100.0
    position: float = 200.0
    angular_rate: float = 5.0
    linear_velocity: float = 10.0
    joints: float = 2.0
    force: float = 1e-3
    foot_velocity: float = 5.0
    terminal_scale: float = 10.0

    def __post_init__(self) -> None:
        for name in ("orientation", "position", "angular_rate", "linear_velocity", "joints"):
            if getattr(self, name) < 0.0:
                raise ValueError(
                    f"state weight {name} must be nonnegative, got {getattr(self, name)}"
                )
        for name in ("force", "foot_velocity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"input weight {name} must be positive, got {getattr(self, name)}")
        if self.terminal_scale < 0.0:
            raise ValueError("terminal scale must be nonnegative")
