"""Gains of the plan-tracking controller."""

from dataclasses import dataclass


@dataclass(frozen=True)
class TrackerGains:
    """PD gains on the CoM and swing feet, and the weight of the planned force feedforward."""

    position_kp: float = 500.0  # N/m
    velocity_kd: float = 50.0  # N s/m
    orientation_kp: float = 100.0  # N m/rad
    angular_rate_kd: float = 10.0  # N m s/rad
    swing_kp: float = 20.0  # 1/s, foot position error to foot velocity
    swing_kd: float = 0.0  # foot velocity error feedthrough
    force_feedforward_weight: float = 1.0

    def __post_init__(self) -> None:
        for name in (
            "position_kp",
            "velocity_kd",
            "orientation_kp",
            "angular_rate_kd",
            "swing_kp",
            "swing_kd",
        ):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if not 0.0 <= self.force_feedforward_weight <= 1.0:
            raise ValueError(
                f"force feedforward weight must lie in [0, 1], got {self.force_feedforward_weight}"
            )

    @classmethod
    def feedforward_only(cls) -> "TrackerGains":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
