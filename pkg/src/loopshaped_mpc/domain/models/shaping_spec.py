"""Per-input frequency shaping specification."""

import math
from collections.abc import Sequence
from dataclasses import dataclass

from loopshaped_mpc.domain.models.errors import InvalidShapingSpecError

DEFAULT_ALPHA_RATIO = 0.1


@dataclass(frozen=True)
class ShapingChannel:
    """Shaping of one input by r(w) = (1 + beta jw) / (1 + alpha jw); alpha == beta is unshaped."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidShapingSpecError(
                f"alpha and beta must be finite, got ({self.alpha}, {self.beta})"
            )
        if self.alpha < 0.0 or self.beta < 0.0:
            raise InvalidShapingSpecError(
                f"alpha and beta must be nonnegative, got ({self.alpha}, {self.beta})"
            )
        if self.alpha > self.beta:
            raise InvalidShapingSpecError(f"alpha={self.alpha} must not exceed beta={self.beta}")

    @classmethod
    def unshaped(cls) -> "ShapingChannel":
        return cls(alpha=0.0, beta=0.0)

    @classmethod
    def from_cutoff(
        cls, cutoff: float, alpha_ratio: float = DEFAULT_ALPHA_RATIO
    ) -> "ShapingChannel":
        """Build a channel from its corner frequency 1/beta in rad/s; inf means unshaped."""
        if math.isinf(cutoff):
            return cls.unshaped()
        if cutoff <= 0.0:
            raise InvalidShapingSpecError(f"cutoff must be positive, got {cutoff}")
        if not 0.0 <= alpha_ratio <= 1.0:
            raise InvalidShapingSpecError(f"alpha ratio must lie in [0, 1], got {alpha_ratio}")
        beta = 1.0 / cutoff
        return cls(alpha=alpha_ratio * beta, beta=beta)

    @property
    def is_shaped(self) -> bool:
        return self.alpha < self.beta

    @property
    def cutoff(self) -> float:
        """Corner frequency 1/beta in rad/s, inf for an unshaped channel."""
        return 1.0 / self.beta if self.is_shaped else math.inf


@dataclass(frozen=True)
class ShapingSpec:
    """Ordered shaping channels, one per input of the problem being shaped."""

    channels: tuple[ShapingChannel, ...]

    def __post_init__(self) -> None:
        channels = tuple(self.channels)
        if not channels:
            raise InvalidShapingSpecError("a shaping spec needs at least one channel")
        object.__setattr__(self, "channels", channels)

    def __len__(self) -> int:
        return len(self.channels)

    @classmethod
    def identity(cls, input_dim: int) -> "ShapingSpec":
        return cls(tuple(ShapingChannel.unshaped() for _ in range(input_dim)))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "ShapingSpec":
        """Build from (alpha, beta) pairs in seconds."""
        return cls(tuple(ShapingChannel(alpha=a, beta=b) for a, b in pairs))

    @classmethod
    def from_cutoffs(
        cls, cutoffs: Sequence[float], alpha_ratio: float = DEFAULT_ALPHA_RATIO
    ) -> "ShapingSpec":
        """Build from corner frequencies 1/beta in rad/s; inf leaves an input unshaped."""
        return cls(tuple(ShapingChannel.from_cutoff(c, alpha_ratio) for c in cutoffs))

    @property
    def shaped_indices(self) -> tuple[int, ...]:
        return tuple(i for i, channel in enumerate(self.channels) if channel.is_shaped)

    @property
    def is_identity(self) -> bool:
        return not self.shaped_indices

    @property
    def max_cutoff(self) -> float:
        """Largest finite corner frequency, inf for an identity spec."""
        finite = [c.cutoff for c in self.channels if c.is_shaped]
        return max(finite) if finite else math.inf

    def channel(self, index: int) -> ShapingChannel:
        if not 0 <= index < len(self.channels):
            raise InvalidShapingSpecError(
                f"input index {index} outside a spec of length {len(self.channels)}"
            )
        return self.channels[index]
