"""Parameters of the experiment studies."""

import math
from dataclasses import dataclass

from loopshaped_mpc.domain.models.shaping_spec import DEFAULT_ALPHA_RATIO
from loopshaped_mpc.domain.models.terrain import TERRAIN_PRESETS


@dataclass(frozen=True)
class StudySettings:
    """Cutoff sets (rad/s, inf = baseline) and run lengths of each study."""

    sweep_cutoffs: tuple[float, ...] = (math.inf, 50.0, 25.0, 10.0, 5.0)
    sweep_velocity: float = 0.5
    sweep_power_cutoff: float = 100.0  # rad/s, spectral power reported above this frequency
    grid_terrains: tuple[str, ...] = ("hard", "medium", "soft")
    grid_cutoffs: tuple[float, ...] = (math.inf, 50.0, 10.0)
    grid_cycles: int = 6
    grid_settle_cycles: int = 1
    ramp_cutoffs: tuple[float, ...] = (math.inf, 10.0)
    ramp_acceleration: float = 0.05
    ramp_duration: float = 30.0
    analysis_pairs: tuple[tuple[float, float], ...] = ((0.01, 0.1), (0.002, 0.02))
    analysis_input_weight: float = 1.0
    force_alpha_ratio: float = DEFAULT_ALPHA_RATIO  # alpha / beta of the studied force filters

    def __post_init__(self) -> None:
        for name in ("sweep_cutoffs", "grid_cutoffs", "ramp_cutoffs"):
            cutoffs = getattr(self, name)
            if not cutoffs or any(not c > 0.0 for c in cutoffs):
                raise ValueError(f"{name} must be a nonempty list of positive cutoffs")
        unknown = [t for t in self.grid_terrains if t not in TERRAIN_PRESETS]
        if unknown:
            raise ValueError(f"unknown terrain presets in grid: {unknown}")
        if self.grid_cycles < 1 or self.grid_settle_cycles < 0:
            raise ValueError("grid cycle counts must be positive")
        if not self.ramp_acceleration > 0.0 or not self.ramp_duration > 0.0:
            raise ValueError("ramp acceleration and duration must be positive")
        if self.sweep_velocity < 0.0:
            raise ValueError("sweep velocity must be nonnegative")
        if not self.sweep_power_cutoff > 0.0:
            raise ValueError("sweep power cutoff must be positive")
        if any(not 0.0 <= a <= b for a, b in self.analysis_pairs):
            raise ValueError("analysis pairs must satisfy 0 <= alpha <= beta")
        if not self.analysis_input_weight > 0.0:
            raise ValueError("analysis input weight must be positive")
        if not 0.0 <= self.force_alpha_ratio < 1.0:
            raise ValueError("force alpha ratio must lie in [0, 1)")


def cutoff_label(cutoff: float) -> str:
    """Row label of a cost function: ``baseline`` or the cutoff in rad/s."""
    return "baseline" if math.isinf(cutoff) else f"{cutoff:g}"
