"""Timing of the receding-horizon loop."""

from dataclasses import dataclass

_MULTIPLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RuntimeRates:
    """Simulation step, replanning period, planning horizon and episode length, in seconds."""

    sim_dt: float = 0.0025
    replan_period: float = 0.025
    horizon: float = 1.0
    node_count: int = 100
    duration: float = 5.0
    free_running: bool = False

    def __post_init__(self) -> None:
        for name in ("sim_dt", "replan_period", "horizon", "duration"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.node_count < 1:
            raise ValueError("node_count must be at least 1")
        ratio = self.replan_period / self.sim_dt
        if abs(ratio - round(ratio)) > _MULTIPLE_TOLERANCE * max(ratio, 1.0) or round(ratio) < 1:
            raise ValueError(
                f"replan period {self.replan_period} s must be a multiple of sim dt {self.sim_dt} s"
            )

    @property
    def steps_per_replan(self) -> int:
        return round(self.replan_period / self.sim_dt)

    @property
    def step_count(self) -> int:
        return round(self.duration / self.sim_dt)

    @property
    def plan_dt(self) -> float:
        return self.horizon / self.node_count
