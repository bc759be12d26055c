"""Optimal control problem definition."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from loopshaped_mpc.domain.contracts.cost_term import CostTermProtocol
    from loopshaped_mpc.domain.models.arrays import FloatArray

DynamicsFn = Callable[["FloatArray", "FloatArray", float], "FloatArray"]
JacobianFn = Callable[["FloatArray", "FloatArray", float], tuple["FloatArray", "FloatArray"]]
ConstraintFn = Callable[["FloatArray", "FloatArray", float], "FloatArray"]
ProjectionFn = Callable[["FloatArray", "FloatArray", float], "FloatArray"]
InitialInputFn = Callable[[float], "FloatArray"]
InitialGuessFn = Callable[["FloatArray", "FloatArray"], "FloatArray"]
HoldStepFn = Callable[["FloatArray", "FloatArray", float], "FloatArray"]


@dataclass(frozen=True)
class OcpDefinition:
    """Continuous-time optimal control problem over a fixed horizon.

    The running cost is ``state_cost(x, t) + input_cost(u, t)``; keeping the two apart lets the
    frequency-shaping transformation move the input cost onto the auxiliary input.

    With ``vectorized`` set, ``dynamics`` and ``equality_constraints`` accept stacked arguments
    of shape (batch, n) and (batch, m) for one time and return stacked results; the solver uses
    this to evaluate finite differences for all perturbations at once.

    The last ``exact_block_dim`` states may be linear, time invariant and driven by the input
    alone. ``exact_block_step(block, u, h)`` then advances them exactly over a held input and
    rollouts use it in place of the integrator for that block.

    ``initial_guess(x0, times)`` returns the inputs of the first rollout at the node ``times``
    and takes precedence over ``initial_input``.
    """

    state_dim: int
    input_dim: int
    dynamics: DynamicsFn
    state_cost: CostTermProtocol
    input_cost: CostTermProtocol
    terminal_cost: CostTermProtocol
    horizon: float
    node_count: int
    start_time: float = 0.0
    equality_constraints: ConstraintFn | None = None
    input_projection: ProjectionFn | None = None
    dynamics_jacobian: JacobianFn | None = None
    constraint_jacobian: JacobianFn | None = None
    initial_input: InitialInputFn | None = None
    vectorized: bool = False
    exact_block_dim: int = 0
    exact_block_step: HoldStepFn | None = None
    initial_guess: InitialGuessFn | None = None

    def __post_init__(self) -> None:
        if self.state_dim <= 0 or self.input_dim <= 0:
            raise ValueError("state and input dimensions must be positive")
        if not 0 <= self.exact_block_dim <= self.state_dim:
            raise ValueError(f"exact block of {self.exact_block_dim} states does not fit")
        if (self.exact_block_dim > 0) != (self.exact_block_step is not None):
            raise ValueError("an exact block needs both a dimension and a step")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.node_count < 1:
            raise ValueError(f"node count must be at least 1, got {self.node_count}")

    @property
    def dt(self) -> float:
        return self.horizon / self.node_count

    def node_times(self) -> FloatArray:
        return self.start_time + self.dt * np.arange(self.node_count + 1)

    def running_cost(self, x: FloatArray, u: FloatArray, t: float) -> float:
        return self.state_cost.value(x, t) + self.input_cost.value(u, t)
