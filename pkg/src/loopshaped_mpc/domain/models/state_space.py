"""State-space realization domain model."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError


def _as_matrix(values: FloatArray | float, name: str) -> FloatArray:
    matrix = frozen_array(values)
    if matrix.ndim == 0:
        matrix = frozen_array(matrix.reshape(1, 1))
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a matrix, got {matrix.ndim} dimensions")
    return matrix


@dataclass(frozen=True, eq=False)
class StateSpaceRealization:
    """LTI system x' = A x + B u, y = C x + D u.

    A realization without states carries A of shape (0, 0), B of shape (0, m) and C of shape
    (p, 0); it is then the static gain D.
    """

    a: FloatArray
    b: FloatArray
    c: FloatArray
    d: FloatArray

    def __post_init__(self) -> None:
        a = _as_matrix(self.a, "A")
        b = _as_matrix(self.b, "B")
        c = _as_matrix(self.c, "C")
        d = _as_matrix(self.d, "D")

        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatchError(f"A must be square, got {a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatchError(f"B must have {n} rows, got {b.shape}")
        if c.shape[1] != n:
            raise DimensionMismatchError(f"C must have {n} columns, got {c.shape}")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatchError(
                f"D must be {(c.shape[0], b.shape[1])} to match B and C, got {d.shape}"
            )

        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def static_gain(cls, d: FloatArray | float) -> "StateSpaceRealization":
        """A realization with no internal state."""
        gain = _as_matrix(d, "D")
        p, m = gain.shape
        return cls(a=np.zeros((0, 0)), b=np.zeros((0, m)), c=np.zeros((p, 0)), d=gain)

    @property
    def n_states(self) -> int:
        return int(self.a.shape[0])

    @property
    def n_inputs(self) -> int:
        return int(self.b.shape[1])

    @property
    def n_outputs(self) -> int:
        return int(self.c.shape[0])

    def is_hurwitz(self) -> bool:
        """True when every eigenvalue of A has a negative real part."""
        if self.n_states == 0:
            return True
        return bool(np.max(np.linalg.eigvals(self.a).real) < 0.0)
