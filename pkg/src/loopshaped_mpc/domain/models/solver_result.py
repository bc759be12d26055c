"""Solver output: trajectory, policy and iteration log."""

from dataclasses import dataclass

from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory

ITERATION_COLUMNS = (
    "iteration",
    "cost",
    "merit",
    "step",
    "violation",
    "regularization",
    "expected_decrease",
)


@dataclass(frozen=True)
class IterationRecord:
    """One accepted (or rejected, step 0) SLQ iteration."""

    iteration: int
    cost: float
    merit: float
    step: float
    violation: float  # infinity norm of the equality residual
    regularization: float
    expected_decrease: float

    def as_row(self) -> tuple[float, ...]:
        return (
            self.iteration,
            self.cost,
            self.merit,
            self.step,
            self.violation,
            self.regularization,
            self.expected_decrease,
        )


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Solution of an optimal control problem.

    ``policy`` is referenced to ``trajectory``: its nominal states and inputs are the
    trajectory's, so replaying it from the same initial state reproduces the trajectory.
    """

    trajectory: Trajectory
    policy: FeedbackPolicy
    iterations: tuple[IterationRecord, ...]
    converged: bool
    regularization: float

    @property
    def final(self) -> IterationRecord:
        return self.iterations[-1]

    @property
    def cost(self) -> float:
        return self.final.cost

    @property
    def merit(self) -> float:
        return self.final.merit
