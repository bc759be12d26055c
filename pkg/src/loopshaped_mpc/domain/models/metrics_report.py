"""Metrics report domain model."""

from pydantic import BaseModel, ConfigDict, Field, field_validator


class MetricsReport(BaseModel):
    """Force-tracking and motion metrics of one episode or plan."""

    model_config = ConfigDict(frozen=True)

    leg_mae: tuple[float, ...] = Field(default=(), description="Per-leg MAE in N")
    leg_mse: tuple[float, ...] = Field(default=(), description="Per-leg MSE in N^2")
    mae: float = Field(ge=0.0, description="Mean over legs of the force MAE in N")
    mse: float = Field(ge=0.0, description="Mean over legs of the force MSE in N^2")
    high_frequency_fraction: float | None = Field(
        default=None, ge=0.0, le=1.0, description="Power fraction above the cutoff"
    )
    base_height_min: float | None = None
    base_height_max: float | None = None
    failure_speed: float | None = Field(
        default=None, description="Commanded speed when the episode failed, m/s"
    )

    @field_validator("leg_mae", "leg_mse")
    @classmethod
    def _nonnegative(cls, values: tuple[float, ...]) -> tuple[float, ...]:
        if any(v < 0.0 for v in values):
            raise ValueError("per-leg metrics must be nonnegative")
        return values

    @property
    def base_height_excursion(self) -> float | None:
        if self.base_height_min is None or self.base_height_max is None:
            return None
        return self.base_height_max - self.base_height_min
