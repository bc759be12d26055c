"""Quadruped robot parameters."""

import math
from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError
from loopshaped_mpc.domain.models.kinodynamic import LEG_COUNT

GRAVITY = 9.81

# +1 for left legs, -1 for right legs, in LEG_NAMES order.
LATERAL_SIGNS = (1.0, -1.0, 1.0, -1.0)
# Front knees bend backwards (negative), hind knees forwards.
KNEE_SIGNS = (-1.0, -1.0, 1.0, 1.0)


def _stance_joint_angles(
    lateral_offset: float, thigh: float, shank: float, height: float, knee_sign: float
) -> tuple[float, float, float]:
    """Joint angles placing the foot straight below the hip at ``height``."""
    cos_knee = (height**2 - thigh**2 - shank**2) / (2.0 * thigh * shank)
    if not -1.0 <= cos_knee <= 1.0:
        raise ValueError(
            f"stand height {height} m is unreachable with links ({thigh}, {shank}) m"
        )
    knee = knee_sign * math.acos(cos_knee)
    hip = -math.atan2(shank * math.sin(knee), thigh + shank * math.cos(knee))
    return (0.0, hip, knee)


@dataclass(frozen=True, eq=False)
class RobotParams:
    """Mass properties and leg geometry.

    The inertia is constant and taken at the default configuration. Each leg has an abduction
    joint followed by hip and knee flexion; ``link_lengths[leg]`` holds the lateral abduction
    offset, the thigh and the shank length.
    """

    mass: float
    inertia: FloatArray
    hip_offsets: FloatArray  # (4, 3) body frame, from the CoM
    link_lengths: FloatArray  # (4, 3)
    default_joints: FloatArray  # (12,)
    stand_height: float
    gravity: float = GRAVITY

    def __post_init__(self) -> None:
        inertia = frozen_array(self.inertia)
        hip_offsets = frozen_array(self.hip_offsets)
        link_lengths = frozen_array(self.link_lengths)
        default_joints = frozen_array(self.default_joints)

        if not self.mass > 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if inertia.shape != (3, 3) or not np.allclose(inertia, inertia.T):
            raise ValueError("inertia must be a symmetric 3x3 matrix")
        if np.min(np.linalg.eigvalsh(inertia)) <= 0.0:
            raise ValueError("inertia must be positive definite")
        if hip_offsets.shape != (LEG_COUNT, 3):
            raise DimensionMismatchError("hip offsets must have shape (4, 3)")
        if link_lengths.shape != (LEG_COUNT, 3) or np.any(link_lengths[:, 1:] <= 0.0):
            raise ValueError("link lengths must have shape (4, 3) with positive thigh and shank")
        if default_joints.shape != (3 * LEG_COUNT,):
            raise DimensionMismatchError("default joint configuration must have 12 entries")
        if not self.stand_height > 0.0:
            raise ValueError("stand height must be positive")

        object.__setattr__(self, "inertia", inertia)
        object.__setattr__(self, "hip_offsets", hip_offsets)
        object.__setattr__(self, "link_lengths", link_lengths)
        object.__setattr__(self, "default_joints", default_joints)

    @classmethod
    def with_stand_height(
        cls,
        mass: float,
        inertia: FloatArray,
        hip_offsets: FloatArray,
        link_lengths: FloatArray,
        stand_height: float,
    ) -> "RobotParams":
        """Build parameters whose default configuration puts every foot below its hip."""
        lengths = np.asarray(link_lengths, dtype=float)
        joints = [
            _stance_joint_angles(
                lengths[leg, 0], lengths[leg, 1], lengths[leg, 2], stand_height, KNEE_SIGNS[leg]
            )
            for leg in range(LEG_COUNT)
        ]
        return cls(
            mass=mass,
            inertia=inertia,
            hip_offsets=hip_offsets,
            link_lengths=lengths,
            default_joints=np.concatenate(joints),
            stand_height=stand_height,
        )

    @classmethod
    def anymal_like(cls, stand_height: float = 0.45) -> "RobotParams":
        return cls.with_stand_height(
            mass=30.0,
            inertia=np.diag([0.88, 1.85, 1.97]),
            hip_offsets=np.array(
                [[0.34, 0.19, 0.0], [0.34, -0.19, 0.0], [-0.34, 0.19, 0.0], [-0.34, -0.19, 0.0]]
            ),
            link_lengths=np.tile([0.11, 0.25, 0.33], (LEG_COUNT, 1)),
            stand_height=stand_height,
        )

    @property
    def weight(self) -> float:
        return self.mass * self.gravity

    def default_footprint(self) -> FloatArray:
        """Foot positions relative to the CoM (body frame) in the default configuration."""
        feet = np.array(self.hip_offsets, dtype=float)
        feet[:, 1] += np.asarray(LATERAL_SIGNS) * self.link_lengths[:, 0]
        feet[:, 2] -= self.stand_height
        return feet
