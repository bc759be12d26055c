"""Array aliases and helpers shared by the numeric domain models."""

from typing import Any

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
BoolArray = npt.NDArray[np.bool_]


def frozen_array(values: Any, dtype: Any = np.float64) -> npt.NDArray[Any]:
    """Return a read-only copy of ``values`` with the given dtype."""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array
