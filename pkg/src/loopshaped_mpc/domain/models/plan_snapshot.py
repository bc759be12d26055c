"""Immutable plan handed from the planner to the tracker."""

from dataclasses import dataclass

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.filter_bank import FilterBank
from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory


@dataclass(frozen=True, eq=False)
class PlanSnapshot:
    """A solved plan over the (possibly filter-augmented) state.

    The first ``state_dim`` entries of every trajectory state are the robot state, the rest the
    filter states. Trajectory inputs are the auxiliary inputs nu of a shaped plan, or the plant
    inputs themselves when ``bank`` has no states.
    """

    trajectory: Trajectory
    policy: FeedbackPolicy
    bank: FilterBank
    state_dim: int
    sequence: int = 0

    def __post_init__(self) -> None:
        if self.trajectory.state_dim != self.state_dim + self.bank.n_states:
            raise ValueError(
                f"plan state has {self.trajectory.state_dim} entries, expected "
                f"{self.state_dim} + {self.bank.n_states}"
            )

    @property
    def start_time(self) -> float:
        return self.trajectory.start_time

    @property
    def end_time(self) -> float:
        return self.trajectory.end_time

    def robot_state_at(self, t: float) -> FloatArray:
        return self.trajectory.state_at(t)[: self.state_dim]

    def auxiliary_input_at(self, t: float) -> FloatArray:
        return self.trajectory.input_at(t)

