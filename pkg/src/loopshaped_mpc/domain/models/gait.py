"""Gait timing and swing-leg reference parameters."""

import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.kinodynamic import LEG_COUNT

TROT_OFFSETS = (0.0, 0.5, 0.5, 0.0)


class LegMode(StrEnum):
    STANCE = "stance"
    SWING = "swing"


@dataclass(frozen=True)
class ModeInfo:
    """Contact mode of one leg and the phase within that mode, in [0, 1)."""

    mode: LegMode
    phase: float

    @property
    def is_stance(self) -> bool:
        return self.mode is LegMode.STANCE


@dataclass(frozen=True, eq=False)
class GaitSchedule:
    """Periodic clock-driven gait.

    A leg is in stance while its phase ``(t / period - offset) mod 1`` is below the duty factor.
    """

    period: float = 0.7
    duty_factor: float = 0.5
    offsets: tuple[float, ...] = TROT_OFFSETS
    normal: FloatArray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    friction: float = 0.7

    def __post_init__(self) -> None:
        if not self.period > 0.0:
            raise ValueError(f"gait period must be positive, got {self.period}")
        if not 0.0 < self.duty_factor <= 1.0:
            raise ValueError(f"duty factor must lie in (0, 1], got {self.duty_factor}")
        offsets = tuple(float(o) for o in self.offsets)
        if len(offsets) != LEG_COUNT or any(not 0.0 <= o < 1.0 for o in offsets):
            raise ValueError(f"need four phase offsets in [0, 1), got {offsets}")
        if not self.friction > 0.0:
            raise ValueError(f"friction coefficient must be positive, got {self.friction}")
        normal = np.asarray(self.normal, dtype=float)
        norm = float(np.linalg.norm(normal))
        if normal.shape != (3,) or not math.isfinite(norm) or norm == 0.0:
            raise ValueError("terrain normal must be a nonzero 3-vector")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "normal", frozen_array(normal / norm))

    @classmethod
    def trot(cls, period: float = 0.7, friction: float = 0.7) -> "GaitSchedule":
        return cls(period=period, duty_factor=0.5, offsets=TROT_OFFSETS, friction=friction)

    @classmethod
    def standing(cls, friction: float = 0.7) -> "GaitSchedule":
        return cls(duty_factor=1.0, offsets=(0.0, 0.0, 0.0, 0.0), friction=friction)

    @property
    def is_standing(self) -> bool:
        return self.duty_factor >= 1.0

    @property
    def swing_duration(self) -> float:
        return self.period * (1.0 - self.duty_factor)

    @property
    def stance_duration(self) -> float:
        return self.period * self.duty_factor


@dataclass(frozen=True)
class SwingProfile:
    """Normal-direction velocity reference of a swinging foot."""

    apex_height: float = 0.08
    touchdown_velocity: float = -0.75

    def __post_init__(self) -> None:
        if not self.apex_height > 0.0:
            raise ValueError(f"apex height must be positive, got {self.apex_height}")
        if not self.touchdown_velocity < 0.0:
            raise ValueError(
                f"touchdown velocity must be negative, got {self.touchdown_velocity}"
            )
