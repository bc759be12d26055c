"""Sampled loop-gain analysis domain model."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import ComplexArray, FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class LoopAnalysis:
    """Loop gain GK(jw) sampled on a frequency grid with its robustness margin.

    ``margins[k]`` is the smallest singular value of I + GK(jw_k)^-1, or NaN where the sample
    was singular and the margin is undefined.
    """

    frequencies: FloatArray
    loop_gains: ComplexArray
    margins: FloatArray

    def __post_init__(self) -> None:
        frequencies = frozen_array(self.frequencies)
        loop_gains = frozen_array(self.loop_gains, dtype=np.complex128)
        margins = frozen_array(self.margins)

        if frequencies.ndim != 1 or frequencies.size == 0:
            raise DimensionMismatchError("frequency grid must be a nonempty vector")
        if np.any(np.diff(frequencies) <= 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        if loop_gains.ndim != 3 or loop_gains.shape[0] != frequencies.size:
            raise DimensionMismatchError(
                f"loop gains must have shape (k, p, p) with k={frequencies.size}, "
                f"got {loop_gains.shape}"
            )
        if loop_gains.shape[1] != loop_gains.shape[2]:
            raise DimensionMismatchError("loop gain samples must be square")
        if margins.shape != frequencies.shape:
            raise DimensionMismatchError("one margin sample per frequency is required")
        defined = margins[~np.isnan(margins)]
        if np.any(defined < 0.0):
            raise ValueError("margins must be nonnegative")

        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "loop_gains", loop_gains)
        object.__setattr__(self, "margins", margins)

    @property
    def is_siso(self) -> bool:
        return bool(self.loop_gains.shape[1] == 1)

    def magnitudes(self) -> FloatArray:
        """|GK| for SISO loops, the largest singular value otherwise."""
        if self.is_siso:
            return np.abs(self.loop_gains[:, 0, 0])
        return np.linalg.svd(self.loop_gains, compute_uv=False)[:, 0]
