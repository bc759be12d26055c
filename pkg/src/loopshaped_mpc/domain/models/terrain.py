"""Spring-damper terrain model."""

import math
from dataclasses import dataclass, field

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array

# (stiffness N/m, damping N s/m) of the named ground types used by the terrain grid.
TERRAIN_PRESETS: dict[str, tuple[float, float]] = {
    "hard": (1e6, 100.0),
    "medium": (1e5, 50.0),
    "soft": (1e4, 30.0),
}


@dataclass(frozen=True, eq=False)
class TerrainModel:
    """Planar ground through (0, 0, height) with unit normal ``normal``.

    With ``rigid`` set the plant bypasses the contact model and applies the commanded forces.
    """

    stiffness: float = 1e6
    damping: float = 100.0
    friction: float = 0.7
    tangential_damping: float = 2000.0  # N s/m, viscous friction below the Coulomb limit
    height: float = 0.0
    normal: FloatArray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    rigid: bool = False
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.stiffness > 0.0:
            raise ValueError(f"terrain stiffness must be positive, got {self.stiffness}")
        if self.damping < 0.0:
            raise ValueError(f"terrain damping must be nonnegative, got {self.damping}")
        if not self.friction > 0.0:
            raise ValueError(f"friction coefficient must be positive, got {self.friction}")
        if not self.tangential_damping > 0.0:
            raise ValueError("tangential damping must be positive")
        normal = np.asarray(self.normal, dtype=float)
        norm = float(np.linalg.norm(normal))
        if normal.shape != (3,) or not math.isfinite(norm) or normal[2] <= 0.0:
            raise ValueError("terrain normal must be a 3-vector pointing upwards")
        object.__setattr__(self, "normal", frozen_array(normal / norm))

    @classmethod
    def preset(cls, name: str, friction: float = 0.7) -> "TerrainModel":
        if name not in TERRAIN_PRESETS:
            raise ValueError(
                f"unknown terrain preset {name!r}, expected one of {list(TERRAIN_PRESETS)}"
            )
        stiffness, damping = TERRAIN_PRESETS[name]
        return cls(stiffness=stiffness, damping=damping, friction=friction, name=name)

    @classmethod
    def rigid_ground(cls, friction: float = 0.7) -> "TerrainModel":
        return cls(friction=friction, rigid=True, name="rigid")

    def signed_distance(self, point: FloatArray) -> float:
        """Distance of ``point`` above the ground along the normal, negative when below."""
        return float(self.normal @ (point - np.array([0.0, 0.0, self.height])))
