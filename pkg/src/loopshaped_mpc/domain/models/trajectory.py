"""Discretized trajectory and time-varying affine feedback policy."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError, ExtrapolationError

_TIME_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on N+1 uniformly spaced nodes and zero-order-hold inputs on the first N."""

    times: FloatArray
    states: FloatArray
    inputs: FloatArray

    def __post_init__(self) -> None:
        times = frozen_array(self.times)
        states = frozen_array(self.states)
        inputs = frozen_array(self.inputs)

        if times.ndim != 1 or times.size < 2:
            raise DimensionMismatchError("a trajectory needs at least two nodes")
        if states.ndim != 2 or states.shape[0] != times.size:
            raise DimensionMismatchError(
                f"states must have shape ({times.size}, n), got {states.shape}"
            )
        if inputs.ndim != 2 or inputs.shape[0] != times.size - 1:
            raise DimensionMismatchError(
                f"inputs must have shape ({times.size - 1}, m), got {inputs.shape}"
            )
        steps = np.diff(times)
        if np.any(steps <= 0.0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("trajectory time grid must be uniform and increasing")

        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "inputs", inputs)

    @property
    def node_count(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def state_dim(self) -> int:
        return int(self.states.shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.inputs.shape[1])

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def start_time(self) -> float:
        return float(self.times[0])

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def covers(self, t: float) -> bool:
        return self.start_time - _TIME_EPS <= t <= self.end_time + _TIME_EPS

    def input_index(self, t: float) -> int:
        """Index of the zero-order-hold interval containing ``t``."""
        if not self.covers(t):
            raise ExtrapolationError(
                f"t={t:.6f} outside trajectory [{self.start_time:.6f}, {self.end_time:.6f}]"
            )
        index = int(np.floor((t - self.start_time) / self.dt + _TIME_EPS))
        return min(max(index, 0), self.node_count - 1)

    def input_at(self, t: float) -> FloatArray:
        return self.inputs[self.input_index(t)]

    def state_at(self, t: float) -> FloatArray:
        """Linear interpolation between nodes."""
        if not self.covers(t):
            raise ExtrapolationError(
                f"t={t:.6f} outside trajectory [{self.start_time:.6f}, {self.end_time:.6f}]"
            )
        position = (t - self.start_time) / self.dt
        index = min(max(int(np.floor(position)), 0), self.node_count - 1)
        weight = min(max(position - index, 0.0), 1.0)
        return (1.0 - weight) * self.states[index] + weight * self.states[index + 1]


@dataclass(frozen=True, eq=False)
class FeedbackPolicy:
    """Per-node affine law u_k = u_nom_k + step * du_k + K_k (x - x_nom_k).

    The feedforward input of the policy is ``nominal_inputs + feedforward_updates``.
    """

    nominal_states: FloatArray
    nominal_inputs: FloatArray
    feedforward_updates: FloatArray
    gains: FloatArray

    def __post_init__(self) -> None:
        nominal_states = frozen_array(self.nominal_states)
        nominal_inputs = frozen_array(self.nominal_inputs)
        updates = frozen_array(self.feedforward_updates)
        gains = frozen_array(self.gains)

        n_nodes, m = nominal_inputs.shape
        n = nominal_states.shape[1]
        if nominal_states.shape[0] != n_nodes + 1:
            raise DimensionMismatchError("nominal states need one more node than inputs")
        if updates.shape != nominal_inputs.shape:
            raise DimensionMismatchError("feedforward updates must match nominal inputs")
        if gains.shape != (n_nodes, m, n):
            raise DimensionMismatchError(
                f"gains must have shape {(n_nodes, m, n)}, got {gains.shape}"
            )

        object.__setattr__(self, "nominal_states", nominal_states)
        object.__setattr__(self, "nominal_inputs", nominal_inputs)
        object.__setattr__(self, "feedforward_updates", updates)
        object.__setattr__(self, "gains", gains)

    @classmethod
    def open_loop(cls, trajectory: Trajectory) -> "FeedbackPolicy":
        """Replay the inputs of ``trajectory`` without feedback."""
        n_nodes, m = trajectory.inputs.shape
        return cls(
            nominal_states=trajectory.states,
            nominal_inputs=trajectory.inputs,
            feedforward_updates=np.zeros((n_nodes, m)),
            gains=np.zeros((n_nodes, m, trajectory.state_dim)),
        )

    @property
    def node_count(self) -> int:
        return int(self.nominal_inputs.shape[0])

    @property
    def feedforward(self) -> FloatArray:
        return self.nominal_inputs + self.feedforward_updates

    def input(self, node: int, x: FloatArray, step: float = 1.0) -> FloatArray:
        deviation = x - self.nominal_states[node]
        return (
            self.nominal_inputs[node]
            + step * self.feedforward_updates[node]
            + self.gains[node] @ deviation
        )
