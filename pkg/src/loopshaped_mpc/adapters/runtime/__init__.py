"""Runtime adapters for free-running episodes."""

from loopshaped_mpc.adapters.runtime.free_running_planner import FreeRunningPlanner
from loopshaped_mpc.adapters.runtime.snapshot_store import InMemorySnapshotStore

__all__ = ["FreeRunningPlanner", "InMemorySnapshotStore"]
