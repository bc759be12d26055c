"""Exception hierarchy for the loopshaped MPC library.

Every error raised on purpose by the library derives from ``LoopshapedMpcError`` and, where a
caller would reasonably catch a builtin, from that builtin as well.
"""


class LoopshapedMpcError(Exception):
    """Base class for all library errors."""


class EvaluationAtPoleError(LoopshapedMpcError, ValueError):
    """A transfer function or realization was evaluated at one of its poles."""


class UnsupportedStructureError(LoopshapedMpcError, ValueError):
    """A transfer function does not have the structure an operation supports."""


class SynthesisError(LoopshapedMpcError, ArithmeticError):
    """A feedback design (LQR) could not be computed."""


class InvalidShapingSpecError(LoopshapedMpcError, ValueError):
    """A shaping specification violates 0 <= alpha <= beta or has the wrong length."""


class DimensionMismatchError(LoopshapedMpcError, ValueError):
    """Array shapes or problem dimensions disagree."""


class ExtrapolationError(LoopshapedMpcError, ValueError):
    """A time-stamped series was queried outside the interval it covers."""


class ChartError(LoopshapedMpcError, ValueError):
    """Euler angles left the non-singular chart (|pitch| too close to pi/2)."""


class MisalignedSeriesError(LoopshapedMpcError, ValueError):
    """Two series that must share a time base do not."""


class PlanExpiredError(LoopshapedMpcError, LookupError):
    """The tracker was asked for a time beyond the horizon of its plan."""


class DivergenceError(LoopshapedMpcError, ArithmeticError):
    """A rollout or simulation produced a non-finite state."""

    def __init__(self, message: str, node: int | None = None, time: float | None = None) -> None:
        super().__init__(message)
        self.node = node
        self.time = time


class LinearizationError(LoopshapedMpcError, ArithmeticError):
    """A derivative evaluated to a non-finite value."""

    def __init__(self, message: str, node: int | None = None) -> None:
        super().__init__(message)
        self.node = node


class ConstraintDegeneracyError(LoopshapedMpcError, ArithmeticError):
    """The input Jacobian of the equality constraints lost row rank at a node."""

    def __init__(self, message: str, node: int | None = None) -> None:
        super().__init__(message)
        self.node = node
