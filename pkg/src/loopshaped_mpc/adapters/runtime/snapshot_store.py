"""In-memory plan snapshot store."""

import threading

from loopshaped_mpc.domain.contracts.plan_snapshot_store import PlanSnapshotStoreProtocol
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot


class InMemorySnapshotStore(PlanSnapshotStoreProtocol):
    """Last-writer-wins store shared by the planner thread and the simulation thread."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._snapshot: PlanSnapshot | None = None
        self.publish_count = 0

    def publish(self, snapshot: PlanSnapshot) -> None:
        with self._lock:
            self._snapshot = snapshot
            self.publish_count += 1

    def latest(self) -> PlanSnapshot | None:
        with self._lock:
            return self._snapshot
