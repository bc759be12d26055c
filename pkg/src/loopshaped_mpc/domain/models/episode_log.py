"""Closed-loop episode records."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError
from loopshaped_mpc.domain.models.failure_verdict import FailureVerdict
from loopshaped_mpc.domain.models.kinodynamic import LEG_COUNT, STATE_DIM

REPLAN_COLUMNS = (
    "time",
    "iterations",
    "cost",
    "merit",
    "step",
    "violation",
    "solve_seconds",
    "initial_state_error",
)


@dataclass(frozen=True)
class ReplanRecord:
    """Statistics of one planner call."""

    time: float
    iterations: int
    cost: float
    merit: float
    step: float
    violation: float
    solve_seconds: float
    initial_state_error: float  # plan x0 vs measured state used to build it

    def as_row(self) -> tuple[float, ...]:
        return (
            self.time,
            self.iterations,
            self.cost,
            self.merit,
            self.step,
            self.violation,
            self.solve_seconds,
            self.initial_state_error,
        )


@dataclass(frozen=True, eq=False)
class Touchdown:
    """A foot entering contact."""

    time: float
    leg: int
    position: FloatArray
    commanded_speed: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", frozen_array(self.position))


@dataclass(frozen=True, eq=False)
class EpisodeLog:
    """Time series sampled at the simulation rate; planned and realized series share ``times``."""

    times: FloatArray
    states: FloatArray  # (K, 24)
    planned_forces: FloatArray  # (K, 12) plan forces at each tick
    commanded_forces: FloatArray  # (K, 12) tracker output
    realized_forces: FloatArray  # (K, 12) ground forces
    contacts: BoolArray  # (K, 4)
    planned_heights: FloatArray  # (K,) base height of the plan at each tick
    commanded_speeds: FloatArray  # (K,)
    replans: tuple[ReplanRecord, ...]
    touchdowns: tuple[Touchdown, ...]
    verdict: FailureVerdict
    nominal_height: float

    def __post_init__(self) -> None:
        times = frozen_array(self.times)
        k = times.shape[0]
        expected = {
            "states": (k, STATE_DIM),
            "planned_forces": (k, 3 * LEG_COUNT),
            "commanded_forces": (k, 3 * LEG_COUNT),
            "realized_forces": (k, 3 * LEG_COUNT),
            "planned_heights": (k,),
            "commanded_speeds": (k,),
        }
        for name, shape in expected.items():
            array = frozen_array(getattr(self, name))
            if array.shape != shape:
                raise DimensionMismatchError(f"{name} must have shape {shape}, got {array.shape}")
            object.__setattr__(self, name, array)
        contacts = frozen_array(self.contacts, dtype=np.bool_)
        if contacts.shape != (k, LEG_COUNT):
            raise DimensionMismatchError("one contact flag per leg and sample")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "contacts", contacts)
        object.__setattr__(self, "replans", tuple(self.replans))
        object.__setattr__(self, "touchdowns", tuple(self.touchdowns))

    @property
    def sample_count(self) -> int:
        return int(self.times.shape[0])

    @property
    def base_heights(self) -> FloatArray:
        return self.states[:, 5]

    def window(self, start: float, end: float) -> "EpisodeLog":
        """The samples with start <= t <= end; replans and touchdowns are filtered the same way."""
        mask = (self.times >= start - 1e-12) & (self.times <= end + 1e-12)
        return EpisodeLog(
            times=self.times[mask],
            states=self.states[mask],
            planned_forces=self.planned_forces[mask],
            commanded_forces=self.commanded_forces[mask],
            realized_forces=self.realized_forces[mask],
            contacts=self.contacts[mask],
            planned_heights=self.planned_heights[mask],
            commanded_speeds=self.commanded_speeds[mask],
            replans=tuple(r for r in self.replans if start <= r.time <= end),
            touchdowns=tuple(t for t in self.touchdowns if start <= t.time <= end),
            verdict=self.verdict,
            nominal_height=self.nominal_height,
        )
