"""Tests for the failure detector and the receding-horizon episode loop."""

import math
from dataclasses import replace

import numpy as np
import pytest

from loopshaped_mpc.application.services.mpc_runtime import (
    EpisodeRunner,
    FailureDetector,
    failure_detector,
)
from loopshaped_mpc.application.services.studies import force_shaping
from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.episode_log import EpisodeLog
from loopshaped_mpc.domain.models.errors import DivergenceError
from loopshaped_mpc.domain.models.failure_verdict import FailureReason, FailureVerdict
from loopshaped_mpc.domain.models.gait import GaitSchedule
from loopshaped_mpc.domain.models.kinodynamic import STATE_DIM
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.scenario import Scenario

NOMINAL = 0.45


def base_state(height: float = NOMINAL, roll: float = 0.0) -> np.ndarray:
    state = np.zeros(24)
    state[0] = roll
    state[5] = height
    return state


def log_of(times: list[float], heights: list[float]) -> EpisodeLog:
    k = len(times)
    return EpisodeLog(
        times=np.array(times),
        states=np.array([base_state(h) for h in heights]).reshape(k, 24),
        planned_forces=np.zeros((k, 12)),
        commanded_forces=np.zeros((k, 12)),
        realized_forces=np.zeros((k, 12)),
        contacts=np.ones((k, 4), dtype=bool),
        planned_heights=np.full(k, NOMINAL),
        commanded_speeds=np.zeros(k),
        replans=(),
        touchdowns=(),
        verdict=FailureVerdict.ok(),
        nominal_height=NOMINAL,
    )


def standing_scenario(duration: float = 0.05) -> Scenario:
    return Scenario(
        gait=GaitSchedule.standing(),
        actuator=ActuatorModel.ideal(),
        rates=RuntimeRates(horizon=0.2, node_count=20, duration=duration),
    )


def test_low_base_fails_only_after_persisting() -> None:
    """Given a base below 60 % height, when it stays low past 0.1 s, then the detector fails."""
    detector = FailureDetector(NOMINAL)

    assert not detector.update(0.0, base_state(0.2)).failed
    assert not detector.update(0.1, base_state(0.2)).failed
    verdict = detector.update(0.12, base_state(0.2))

    assert verdict.failed
    assert verdict.reason is FailureReason.HEIGHT
    assert verdict.time == pytest.approx(0.12)


def test_recovering_height_resets_the_timer() -> None:
    """Given a short dip, when the base recovers, then a later dip starts a fresh timer."""
    detector = FailureDetector(NOMINAL)

    detector.update(0.0, base_state(0.2))
    detector.update(0.05, base_state(NOMINAL))

    assert not detector.update(0.08, base_state(0.2)).failed
    assert not detector.update(0.15, base_state(0.2)).failed


def test_large_roll_fails_immediately() -> None:
    """Given a roll beyond the attitude limit, when updating, then the detector fails."""
    verdict = FailureDetector(NOMINAL).update(1.0, base_state(roll=0.7))

    assert verdict.reason is FailureReason.ATTITUDE


def test_non_finite_state_fails() -> None:
    """Given a NaN in the state, when updating, then the failure is non-finite."""
    verdict = FailureDetector(NOMINAL).update(0.3, base_state(math.nan))

    assert verdict.reason is FailureReason.NON_FINITE
    assert verdict.time == 0.3


def test_failure_detector_replays_a_log() -> None:
    """Given a log that sinks and stays low, when replaying, then the failure time is reported."""
    times = [0.01 * k for k in range(40)]
    heights = [NOMINAL if t < 0.1 else 0.1 for t in times]

    verdict = failure_detector(log_of(times, heights))

    assert verdict.reason is FailureReason.HEIGHT
    assert verdict.time == pytest.approx(0.21)


def test_failure_detector_passes_a_healthy_log() -> None:
    """Given a log at nominal height, when replaying, then the verdict is ok."""
    assert failure_detector(log_of([0.0, 0.01], [NOMINAL, NOMINAL])) == FailureVerdict.ok()


def test_failure_detector_needs_samples() -> None:
    """Given an empty log, when replaying, then a ValueError is raised."""
    with pytest.raises(ValueError, match="at least one sample"):
        failure_detector(log_of([], []))


def test_failed_verdict_needs_a_reason() -> None:
    """Given a failed verdict without reason, when validating, then construction fails."""
    with pytest.raises(ValueError):
        FailureVerdict(failed=True)


def test_standing_episode_holds_the_robot_still() -> None:
    """Given a standing scenario on rigid ground, when running, then the robot stays at rest."""
    log = EpisodeRunner(standing_scenario()).run()

    assert not log.verdict.failed
    assert log.sample_count == 20
    assert len(log.replans) == 2
    np.testing.assert_allclose(log.base_heights, NOMINAL, atol=1e-6)
    np.testing.assert_allclose(log.realized_forces[:, 2::3], 73.575, rtol=1e-6)
    assert all(record.solve_seconds == 0.0 for record in log.replans)
    assert all(record.initial_state_error <= 1e-9 for record in log.replans)


def test_deterministic_episodes_repeat_exactly() -> None:
    """Given the same deterministic scenario twice, when running, then the logs are identical."""
    first = EpisodeRunner(standing_scenario()).run()
    second = EpisodeRunner(standing_scenario()).run()

    np.testing.assert_array_equal(first.states, second.states)
    assert [r.as_row() for r in first.replans] == [r.as_row() for r in second.replans]


class ExplodingPlant:
    """Plant that diverges on its third step."""

    def __init__(self) -> None:
        self.steps = 0

    def step(
        self, plant: PlantState, command: np.ndarray | None, dt: float
    ) -> tuple[PlantState, np.ndarray]:
        self.steps += 1
        if self.steps == 3:
            raise DivergenceError("plant blew up", time=plant.time)
        return (
            PlantState(
                time=plant.time + dt,
                state=plant.state,
                contact=np.ones(4, dtype=bool),
                penetration=np.zeros(4),
                lagged_inputs=plant.lagged_inputs,
                leg_extension=plant.leg_extension,
            ),
            np.zeros(12),
        )


def test_plant_divergence_ends_the_episode_with_a_partial_log() -> None:
    """Given a plant that diverges, when running, then the log stops with a non-finite verdict."""
    log = EpisodeRunner(standing_scenario(), plant=ExplodingPlant()).run()

    assert log.verdict.reason is FailureReason.NON_FINITE
    assert log.sample_count == 2
    assert log.verdict.time == pytest.approx(0.005)


def test_tracker_filter_states_follow_the_plan() -> None:
    """Given a force-shaped standing plan, when the tracker advances the filters tick by tick,
    then at every plan node they equal the solver's filter states."""
    scenario = standing_scenario()
    scenario = replace(scenario, shaping=force_shaping(scenario, 10.0))
    runner = EpisodeRunner(scenario)
    plant, filter_state = runner.initial_plant()
    snapshot = runner.planner.plan(plant, filter_state)
    sim_dt = scenario.rates.sim_dt
    ticks_per_node = round(snapshot.trajectory.dt / sim_dt)

    for tick in range(ticks_per_node * snapshot.trajectory.node_count):
        filter_state = runner.tracker.advance_filter(snapshot, filter_state, tick * sim_dt, sim_dt)
        if (tick + 1) % ticks_per_node == 0:
            node = (tick + 1) // ticks_per_node
            np.testing.assert_allclose(
                filter_state, snapshot.trajectory.states[node, STATE_DIM:], atol=1e-9
            )
