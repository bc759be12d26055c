"""Protocol for exchanging plan snapshots between planner and tracker."""

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot


class PlanSnapshotStoreProtocol(Protocol):
    """Last-writer-wins holder of the most recent plan."""

    def publish(self, snapshot: "PlanSnapshot") -> None:
        """Replace the stored plan.

        Args:
            snapshot: The new plan; it must not be mutated afterwards.
        """
        ...

    def latest(self) -> "PlanSnapshot | None":
        """Get the most recent plan.

        Returns:
            The last published snapshot, or None before the first publish.
        """
        ...
