"""Protocol for a twice-differentiable cost term."""

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from loopshaped_mpc.domain.models.arrays import FloatArray


class CostTermProtocol(Protocol):
    """A scalar cost of one vector argument (a state or an input) and time."""

    def value(self, v: "FloatArray", t: float) -> float:
        """Evaluate the cost.

        Args:
            v: State or input vector.
            t: Absolute time in seconds.

        Returns:
            The cost rate (running terms) or cost (terminal terms).
        """
        ...

    def gradient(self, v: "FloatArray", t: float) -> "FloatArray":
        """First derivative with respect to ``v``."""
        ...

    def hessian(self, v: "FloatArray", t: float) -> "FloatArray":
        """Second derivative with respect to ``v``, symmetric."""
        ...
