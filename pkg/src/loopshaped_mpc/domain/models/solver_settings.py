"""SLQ solver settings."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverSettings:
    """Iteration, line-search and regularization parameters of the SLQ solver.

    The time step is not a setting: it is ``horizon / node_count`` of the problem being solved.
    """

    max_iterations: int = 20
    tolerance: float = 1e-3  # relative merit decrease declaring convergence
    backtracking_factor: float = 0.5
    min_step: float = 0.5**10
    fd_step: float = 1e-6
    riccati_substeps: int = 4
    regularization: float = 1e-6
    regularization_floor: float = 1e-6
    regularization_ceiling: float = 1e8
    regularization_increase: float = 10.0
    regularization_decrease: float = 2.0
    constraint_penalty: float = 1e3
    rank_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.riccati_substeps < 1:
            raise ValueError("riccati_substeps must be at least 1")
        if not 0.0 < self.backtracking_factor < 1.0:
            raise ValueError(
                f"backtracking_factor must lie in (0, 1), got {self.backtracking_factor}"
            )
        if not 0.0 < self.min_step <= 1.0:
            raise ValueError(f"min_step must lie in (0, 1], got {self.min_step}")
        for name in (
            "tolerance",
            "fd_step",
            "regularization_floor",
            "regularization_ceiling",
            "constraint_penalty",
            "rank_tolerance",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.regularization < 0.0:
            raise ValueError("regularization must be nonnegative")
        if self.regularization_increase <= 1.0 or self.regularization_decrease <= 1.0:
            raise ValueError("regularization increase and decrease factors must exceed 1")
