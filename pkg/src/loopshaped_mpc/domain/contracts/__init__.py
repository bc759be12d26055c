"""Contracts (protocols/interfaces) used inside the core."""

from loopshaped_mpc.domain.contracts.cost_term import CostTermProtocol
from loopshaped_mpc.domain.contracts.plan_snapshot_store import PlanSnapshotStoreProtocol
from loopshaped_mpc.domain.contracts.planner_task import PlannerTaskProtocol
from loopshaped_mpc.domain.contracts.plant import PlantProtocol

__all__ = [
    "CostTermProtocol",
    "PlanSnapshotStoreProtocol",
    "PlannerTaskProtocol",
    "PlantProtocol",
]
