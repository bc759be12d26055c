"""Background planner task for free-running episodes."""

import asyncio
import logging
from collections.abc import Callable

from loopshaped_mpc.domain.contracts.plan_snapshot_store import PlanSnapshotStoreProtocol
from loopshaped_mpc.domain.contracts.planner_task import PlannerTaskProtocol
from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.ports.planner import Planner

logger = logging.getLogger(__name__)

Measurement = Callable[[], tuple[PlantState, FloatArray] | None]


class FreeRunningPlanner(PlannerTaskProtocol):
    """Replans from the latest measurement every ``replan_period`` seconds of wall time.

    Solves run on a worker thread so the event loop stays responsive; each finished plan is
    published to the store, replacing whatever the tracker was following.
    """

    def __init__(
        self,
        planner: Planner,
        measurement: Measurement,
        store: PlanSnapshotStoreProtocol,
        replan_period: float,
    ) -> None:
        if not replan_period > 0.0:
            raise ValueError(f"replan period must be positive, got {replan_period}")
        self.planner = planner
        self.measurement = measurement
        self.store = store
        self.replan_period = replan_period
        self.replan_count = 0
        self._last_time: float | None = None
        self._stopping = asyncio.Event()
        self._task: asyncio.Task[None] | None = None

    async def start(self) -> None:
        """Start the replanning loop."""
        if self._task is not None and not self._task.done():
            logger.warning("Free-running planner already running")
            return
        self._stopping.clear()
        self._task = asyncio.create_task(self._replan_loop())
        logger.info("Started free-running planner task")

    async def stop(self) -> None:
        """Stop the loop after the solve in progress, if any, has been published."""
        if self._task and not self._task.done():
            self._stopping.set()
            try:
                await self._task
            except asyncio.CancelledError:
                logger.info("Free-running planner cancelled")
            logger.info(f"Stopped free-running planner after {self.replan_count} replan(s)")

    async def _safe_replan(self) -> None:
        try:
            await self._replan()
        except Exception as e:
            logger.exception(f"Error in free-running replan: {e}")

    async def _replan(self) -> None:
        measured = self.measurement()
        if measured is None:
            return
        plant, filter_state = measured
        if self._last_time is not None and plant.time <= self._last_time:
            return
        snapshot = await asyncio.to_thread(self.planner.plan, plant, filter_state)
        self.store.publish(snapshot)
        self._last_time = plant.time
        self.replan_count += 1

    async def _replan_loop(self) -> None:
        while not self._stopping.is_set():
            await self._safe_replan()
            try:
                await asyncio.wait_for(self._stopping.wait(), timeout=self.replan_period)
            except TimeoutError:
                continue
