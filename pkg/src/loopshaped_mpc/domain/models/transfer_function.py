"""Rational transfer function domain model."""

import math
from dataclasses import dataclass

from loopshaped_mpc.domain.models.errors import UnsupportedStructureError


def _trim(coefficients: tuple[float, ...]) -> tuple[float, ...]:
    """Drop zero coefficients of the highest powers, keeping at least one entry."""
    trimmed = list(coefficients)
    while len(trimmed) > 1 and trimmed[-1] == 0.0:
        trimmed.pop()
    return tuple(trimmed)


@dataclass(frozen=True)
class RationalTransferFunction:
    """Ratio of two real polynomials in s = j*omega.

    Coefficients are stored in ascending powers of s, so ``(1.0, 0.1)`` is ``1 + 0.1 s``.
    """

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]

    def __post_init__(self) -> None:
        numerator = _trim(tuple(float(c) for c in self.numerator) or (0.0,))
        denominator = _trim(tuple(float(c) for c in self.denominator) or (0.0,))

        if not all(math.isfinite(c) for c in numerator + denominator):
            raise UnsupportedStructureError("transfer function coefficients must be finite")
        if denominator[-1] == 0.0:
            raise UnsupportedStructureError("denominator must not be identically zero")
        if denominator[0] == 0.0:
            raise UnsupportedStructureError(
                "denominator constant coefficient must be nonzero (pole at the origin)"
            )

        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @classmethod
    def identity(cls) -> "RationalTransferFunction":
        """The unit gain 1/1."""
        return cls(numerator=(1.0,), denominator=(1.0,))

    @property
    def numerator_degree(self) -> int:
        return len(self.numerator) - 1

    @property
    def denominator_degree(self) -> int:
        return len(self.denominator) - 1

    @property
    def is_proper(self) -> bool:
        return self.numerator_degree <= self.denominator_degree

    @property
    def dc_gain(self) -> float:
        return self.numerator[0] / self.denominator[0]
