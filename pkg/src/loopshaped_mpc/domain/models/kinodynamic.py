"""Kinodynamic quadruped state and input layouts."""

import math
from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import ChartError, DimensionMismatchError

LEG_NAMES = ("LF", "RF", "LH", "RH")
LEG_COUNT = 4
JOINTS_PER_LEG = 3

STATE_DIM = 24
INPUT_DIM = 24

EULER = slice(0, 3)
POSITION = slice(3, 6)
ANGULAR_RATE = slice(6, 9)
LINEAR_VELOCITY = slice(9, 12)
JOINTS = slice(12, 24)
BASE = slice(0, 12)

FORCES = slice(0, 12)
JOINT_VELOCITIES = slice(12, 24)

# Euler angles leave the chart this close to pitch = +-pi/2.
CHART_MARGIN = 1e-3


def leg_joints(leg: int) -> slice:
    """Slice of leg ``leg`` in the joint block (and in the joint-velocity block)."""
    return slice(JOINTS_PER_LEG * leg, JOINTS_PER_LEG * (leg + 1))


def state_joints(leg: int) -> slice:
    return slice(JOINTS.start + JOINTS_PER_LEG * leg, JOINTS.start + JOINTS_PER_LEG * (leg + 1))


def input_force(leg: int) -> slice:
    return slice(3 * leg, 3 * (leg + 1))


def input_joint_velocities(leg: int) -> slice:
    start = JOINT_VELOCITIES.start + JOINTS_PER_LEG * leg
    return slice(start, start + JOINTS_PER_LEG)


def check_chart(pitch: float) -> None:
    if not abs(pitch) < math.pi / 2.0 - CHART_MARGIN:
        raise ChartError(f"pitch {pitch:.6f} rad is at the Euler-angle singularity")


@dataclass(frozen=True, eq=False)
class KinodynState:
    """Base pose and twist plus joint positions.

    Euler angles are Z-Y-X (roll, pitch, yaw), position and linear velocity of the CoM are in
    world and body frame respectively, the angular rate is in body frame.
    """

    euler: FloatArray
    position: FloatArray
    angular_rate: FloatArray
    linear_velocity: FloatArray
    joints: FloatArray

    def __post_init__(self) -> None:
        shapes = {
            "euler": 3,
            "position": 3,
            "angular_rate": 3,
            "linear_velocity": 3,
            "joints": LEG_COUNT * JOINTS_PER_LEG,
        }
        for name, size in shapes.items():
            array = frozen_array(getattr(self, name))
            if array.shape != (size,):
                raise DimensionMismatchError(f"{name} must have {size} entries, got {array.shape}")
            if not np.all(np.isfinite(array)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, array)
        check_chart(float(self.euler[1]))

    @classmethod
    def from_vector(cls, x: FloatArray) -> "KinodynState":
        if np.shape(x) != (STATE_DIM,):
            raise DimensionMismatchError(f"state vector must have {STATE_DIM} entries")
        return cls(
            euler=x[EULER],
            position=x[POSITION],
            angular_rate=x[ANGULAR_RATE],
            linear_velocity=x[LINEAR_VELOCITY],
            joints=x[JOINTS],
        )

    def to_vector(self) -> FloatArray:
        return np.concatenate(
            [self.euler, self.position, self.angular_rate, self.linear_velocity, self.joints]
        )


@dataclass(frozen=True, eq=False)
class KinodynInput:
    """World-frame contact force per foot and joint velocity commands."""

    forces: FloatArray  # (4, 3)
    joint_velocities: FloatArray  # (12,)

    def __post_init__(self) -> None:
        forces = frozen_array(self.forces)
        joint_velocities = frozen_array(self.joint_velocities)
        if forces.shape != (LEG_COUNT, 3):
            raise DimensionMismatchError(f"forces must have shape (4, 3), got {forces.shape}")
        if joint_velocities.shape != (LEG_COUNT * JOINTS_PER_LEG,):
            raise DimensionMismatchError("joint velocities must have 12 entries")
        if not (np.all(np.isfinite(forces)) and np.all(np.isfinite(joint_velocities))):
            raise ValueError("inputs must be finite")
        object.__setattr__(self, "forces", forces)
        object.__setattr__(self, "joint_velocities", joint_velocities)

    @classmethod
    def from_vector(cls, u: FloatArray) -> "KinodynInput":
        if np.shape(u) != (INPUT_DIM,):
            raise DimensionMismatchError(f"input vector must have {INPUT_DIM} entries")
        return cls(forces=u[FORCES].reshape(LEG_COUNT, 3), joint_velocities=u[JOINT_VELOCITIES])

    def to_vector(self) -> FloatArray:
        return np.concatenate([self.forces.reshape(-1), self.joint_velocities])
