"""Tests for the free-running planner task and the snapshot store."""

import asyncio
import logging
import threading
from unittest.mock import MagicMock

import numpy as np
import pytest

from loopshaped_mpc.adapters.runtime import FreeRunningPlanner, InMemorySnapshotStore
from loopshaped_mpc.application.services.loopshaping import make_filter_bank
from loopshaped_mpc.application.services.mpc_runtime import EpisodeRunner
from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.gait import GaitSchedule
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.scenario import Scenario
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory


def snapshot(sequence: int) -> PlanSnapshot:
    trajectory = Trajectory(
        times=np.array([0.0, 1.0]), states=np.zeros((2, 1)), inputs=np.zeros((1, 1))
    )
    return PlanSnapshot(
        trajectory=trajectory,
        policy=FeedbackPolicy.open_loop(trajectory),
        bank=make_filter_bank(ShapingSpec.identity(1)),
        state_dim=1,
        sequence=sequence,
    )


def measurement_at(t: float) -> tuple[PlantState, np.ndarray]:
    plant = PlantState(
        time=t,
        state=np.zeros(24),
        contact=np.zeros(4, dtype=bool),
        penetration=np.zeros(4),
        lagged_inputs=np.zeros(24),
        leg_extension=np.zeros(4),
    )
    return plant, np.zeros(0)


def test_store_starts_empty_and_keeps_the_last_plan() -> None:
    """Given two publishes, when reading the store, then the second plan is returned."""
    store = InMemorySnapshotStore()
    assert store.latest() is None

    store.publish(snapshot(1))
    store.publish(snapshot(2))

    latest = store.latest()
    assert latest is not None
    assert latest.sequence == 2
    assert store.publish_count == 2


def test_store_is_safe_across_threads() -> None:
    """Given concurrent publishers, when all finish, then every publish was counted."""
    store = InMemorySnapshotStore()

    def publish_many(offset: int) -> None:
        for k in range(100):
            store.publish(snapshot(offset + k))

    threads = [threading.Thread(target=publish_many, args=(1000 * i,)) for i in range(4)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert store.publish_count == 400


def test_planner_task_rejects_non_positive_period() -> None:
    """Given a zero replan period, when constructing, then a ValueError is raised."""
    with pytest.raises(ValueError, match="replan period"):
        FreeRunningPlanner(MagicMock(), lambda: None, InMemorySnapshotStore(), 0.0)


@pytest.mark.asyncio
async def test_planner_task_publishes_new_plans() -> None:
    """Given advancing measurements, when the task runs, then each new measurement is planned."""
    clock = {"t": 0.0}

    def measurement() -> tuple[PlantState, np.ndarray]:
        clock["t"] += 0.01
        return measurement_at(clock["t"])

    planner = MagicMock()
    planner.plan.side_effect = lambda plant, filter_state: snapshot(int(plant.time * 100))
    store = InMemorySnapshotStore()
    task = FreeRunningPlanner(planner, measurement, store, replan_period=0.01)

    await task.start()
    await asyncio.sleep(0.1)
    await task.stop()

    assert task.replan_count >= 2
    assert store.publish_count == task.replan_count
    assert planner.plan.call_count == task.replan_count


@pytest.mark.asyncio
async def test_planner_task_skips_stale_measurements() -> None:
    """Given a measurement that never advances, when the task runs, then it plans only once."""
    planner = MagicMock()
    planner.plan.return_value = snapshot(1)
    store = InMemorySnapshotStore()
    task = FreeRunningPlanner(planner, lambda: measurement_at(0.5), store, replan_period=0.005)

    await task.start()
    await asyncio.sleep(0.05)
    await task.stop()

    assert planner.plan.call_count == 1
    assert store.publish_count == 1


@pytest.mark.asyncio
async def test_planner_task_survives_solver_errors(caplog: pytest.LogCaptureFixture) -> None:
    """Given a planner that raises, when the task runs, then errors are logged and it continues."""
    clock = {"t": 0.0}

    def measurement() -> tuple[PlantState, np.ndarray]:
        clock["t"] += 0.01
        return measurement_at(clock["t"])

    planner = MagicMock()
    planner.plan.side_effect = RuntimeError("solver exploded")
    task = FreeRunningPlanner(planner, measurement, InMemorySnapshotStore(), replan_period=0.005)

    with caplog.at_level(logging.ERROR):
        await task.start()
        await asyncio.sleep(0.05)
        await task.stop()

    assert planner.plan.call_count >= 2
    assert task.replan_count == 0
    assert "solver exploded" in caplog.text


@pytest.mark.asyncio
async def test_starting_twice_keeps_one_loop() -> None:
    """Given a running task, when starting it again, then no second loop is created."""
    planner = MagicMock()
    planner.plan.return_value = snapshot(1)
    task = FreeRunningPlanner(
        planner, lambda: measurement_at(0.5), InMemorySnapshotStore(), replan_period=0.01
    )

    await task.start()
    first = task._task
    await task.start()

    assert task._task is first
    await task.stop()


@pytest.mark.asyncio
async def test_free_running_standing_episode() -> None:
    """Given a standing scenario, when running free, then it completes without failure."""
    scenario = Scenario(
        gait=GaitSchedule.standing(),
        actuator=ActuatorModel.ideal(),
        rates=RuntimeRates(horizon=0.2, node_count=20, duration=0.05, free_running=True),
        deterministic=False,
    )
    runner = EpisodeRunner(scenario)
    store = InMemorySnapshotStore()
    task = FreeRunningPlanner(
        runner.planner, runner.latest_measurement, store, scenario.rates.replan_period
    )

    log = await runner.run_free_running(store, task)

    assert not log.verdict.failed
    assert log.sample_count == 20
    assert store.publish_count >= 1
    np.testing.assert_allclose(log.base_heights, 0.45, atol=1e-6)
