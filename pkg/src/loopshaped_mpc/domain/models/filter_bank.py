"""Filter bank realizing the inverse shaping functions of every input."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.errors import DimensionMismatchError, UnsupportedStructureError
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Block-diagonal realization mapping the auxiliary input nu to the plant input u.

    ``shaped_indices[j]`` is the input whose filter owns state ``j``. Unshaped inputs own no state
    and pass through with unit gain.
    """

    realization: StateSpaceRealization
    shaped_indices: tuple[int, ...]
    is_derivative: bool = False

    def __post_init__(self) -> None:
        realization = self.realization
        if realization.n_inputs != realization.n_outputs:
            raise DimensionMismatchError("a filter bank maps m inputs to m outputs")
        if realization.n_states != len(self.shaped_indices):
            raise DimensionMismatchError(
                f"{realization.n_states} filter states but {len(self.shaped_indices)} shaped inputs"
            )
        if any(not 0 <= i < realization.n_inputs for i in self.shaped_indices):
            raise DimensionMismatchError("shaped input index out of range")
        if not self.is_derivative and not realization.is_hurwitz():
            raise UnsupportedStructureError("filter bank states must decay, A is not Hurwitz")
        object.__setattr__(self, "shaped_indices", tuple(self.shaped_indices))

    @property
    def n_states(self) -> int:
        return self.realization.n_states

    @property
    def n_inputs(self) -> int:
        return self.realization.n_inputs

    @property
    def a(self) -> FloatArray:
        return self.realization.a

    @property
    def b(self) -> FloatArray:
        return self.realization.b

    @property
    def c(self) -> FloatArray:
        return self.realization.c

    @property
    def d(self) -> FloatArray:
        return self.realization.d

    @property
    def is_diagonal(self) -> bool:
        a = self.realization.a
        return bool(np.array_equal(a, np.diag(np.diag(a))))

    def steady_state(self, nu: FloatArray) -> FloatArray:
        """Filter state that a constant input ``nu`` holds at rest, -A^-1 B nu."""
        if self.n_states == 0:
            return np.zeros(0)
        if self.is_derivative:
            raise ValueError("a derivative bank has no steady state for a constant input")
        return -np.linalg.solve(self.a, self.b @ np.asarray(nu, dtype=float))
