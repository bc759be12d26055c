"""Linear-quadratic approximation of an optimal control problem about a trajectory."""

from dataclasses import dataclass

from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class NodeConstraint:
    """Linearized equality constraint C dx + D du + e = 0 active on one interval."""

    state_jacobian: FloatArray
    input_jacobian: FloatArray
    residual: FloatArray

    def __post_init__(self) -> None:
        c = frozen_array(self.state_jacobian)
        d = frozen_array(self.input_jacobian)
        e = frozen_array(self.residual)
        if c.ndim != 2 or d.ndim != 2 or e.ndim != 1:
            raise DimensionMismatchError("constraint Jacobians must be matrices, residual a vector")
        if not c.shape[0] == d.shape[0] == e.shape[0]:
            raise DimensionMismatchError(
                f"constraint rows disagree: C {c.shape}, D {d.shape}, e {e.shape}"
            )
        object.__setattr__(self, "state_jacobian", c)
        object.__setattr__(self, "input_jacobian", d)
        object.__setattr__(self, "residual", e)

    @property
    def rows(self) -> int:
        return int(self.residual.shape[0])


@dataclass(frozen=True, eq=False)
class LqApproximation:
    """Per-interval continuous-time Jacobians and cost expansions, stacked along the first axis.

    Interval k spans [t_k, t_k+1] and is expanded about (x_k, u_k). Cost derivatives are rates
    (not multiplied by dt); the terminal expansion is taken at x_N.
    """

    dt: float
    state_jacobians: FloatArray  # (N, n, n)
    input_jacobians: FloatArray  # (N, n, m)
    state_gradients: FloatArray  # (N, n)
    input_gradients: FloatArray  # (N, m)
    state_hessians: FloatArray  # (N, n, n)
    input_hessians: FloatArray  # (N, m, m)
    terminal_gradient: FloatArray
    terminal_hessian: FloatArray
    constraints: tuple[NodeConstraint | None, ...]

    def __post_init__(self) -> None:
        a = frozen_array(self.state_jacobians)
        b = frozen_array(self.input_jacobians)
        if a.ndim != 3 or b.ndim != 3 or a.shape[:2] != b.shape[:2]:
            raise DimensionMismatchError(f"dynamics Jacobians disagree: {a.shape} vs {b.shape}")
        n_nodes, n, m = b.shape
        expected = {
            "state_gradients": (n_nodes, n),
            "input_gradients": (n_nodes, m),
            "state_hessians": (n_nodes, n, n),
            "input_hessians": (n_nodes, m, m),
            "terminal_gradient": (n,),
            "terminal_hessian": (n, n),
        }
        for name, shape in expected.items():
            array = frozen_array(getattr(self, name))
            if array.shape != shape:
                raise DimensionMismatchError(f"{name} must have shape {shape}, got {array.shape}")
            object.__setattr__(self, name, array)
        if len(self.constraints) != n_nodes:
            raise DimensionMismatchError("one constraint entry (or None) per interval is required")
        object.__setattr__(self, "state_jacobians", a)
        object.__setattr__(self, "input_jacobians", b)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def node_count(self) -> int:
        return int(self.input_jacobians.shape[0])

    @property
    def state_dim(self) -> int:
        return int(self.input_jacobians.shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.input_jacobians.shape[2])
