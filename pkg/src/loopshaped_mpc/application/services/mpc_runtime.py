"""Receding-horizon loop coupling the planner, the tracker and the simulation plant."""

from __future__ import annotations

import asyncio
import logging
import threading
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from loopshaped_mpc.application.services.loopshaping import augment_ocp, make_filter_bank
from loopshaped_mpc.application.services.quadruped_model import (
    BaseReference,
    default_state,
    foot_positions_world,
)
from loopshaped_mpc.application.services.quadruped_problem import QuadrupedProblem
from loopshaped_mpc.application.services.sim_plant import SimulatedPlant
from loopshaped_mpc.application.services.slq_solver import SlqSolver
from loopshaped_mpc.application.services.tracking_controller import TrackingController
from loopshaped_mpc.domain.models.episode_log import EpisodeLog, ReplanRecord, Touchdown
from loopshaped_mpc.domain.models.errors import (
    ConstraintDegeneracyError,
    DivergenceError,
    LinearizationError,
    PlanExpiredError,
    SynthesisError,
)
from loopshaped_mpc.domain.models.failure_verdict import FailureReason, FailureVerdict
from loopshaped_mpc.domain.models.kinodynamic import (
    FORCES,
    LEG_COUNT,
    STATE_DIM,
)
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState

if TYPE_CHECKING:
    from loopshaped_mpc.domain.contracts.plan_snapshot_store import PlanSnapshotStoreProtocol
    from loopshaped_mpc.domain.contracts.planner_task import PlannerTaskProtocol
    from loopshaped_mpc.domain.contracts.plant import PlantProtocol
    from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray
    from loopshaped_mpc.domain.models.scenario import Scenario
    from loopshaped_mpc.domain.models.solver_result import SolverResult

logger = logging.getLogger(__name__)

HEIGHT_RATIO = 0.6
HEIGHT_PERSISTENCE = 0.1  # s
ATTITUDE_LIMIT = 0.6  # rad

SOLVER_ERRORS = (
    DivergenceError,
    LinearizationError,
    ConstraintDegeneracyError,
    SynthesisError,
)


class FailureDetector:
    """Online failure check on the measured base state.

    Fails when the base stays below ``HEIGHT_RATIO`` of the nominal height for longer than
    ``HEIGHT_PERSISTENCE``, when roll or pitch exceed ``ATTITUDE_LIMIT`` or when the state is not
    finite.
    """

    def __init__(self, nominal_height: float) -> None:
        self.nominal_height = nominal_height
        self._low_since: float | None = None

    def update(self, t: float, state: FloatArray) -> FailureVerdict:
        if not np.all(np.isfinite(state)):
            return FailureVerdict.failure(FailureReason.NON_FINITE, t, "non-finite base state")
        roll, pitch = float(state[0]), float(state[1])
        if max(abs(roll), abs(pitch)) > ATTITUDE_LIMIT:
            return FailureVerdict.failure(
                FailureReason.ATTITUDE, t, f"roll {roll:.3f} rad, pitch {pitch:.3f} rad"
            )
        height = float(state[5])
        if height >= HEIGHT_RATIO * self.nominal_height:
            self._low_since = None
            return FailureVerdict.ok()
        if self._low_since is None:
            self._low_since = t
        if t - self._low_since > HEIGHT_PERSISTENCE:
            return FailureVerdict.failure(
                FailureReason.HEIGHT, t, f"base at {height:.3f} m since t={self._low_since:.3f}"
            )
        return FailureVerdict.ok()


def failure_detector(log: EpisodeLog) -> FailureVerdict:
    """Replay the failure check over the samples of ``log``.

    Raises:
        ValueError: If the log has no samples.
    """
    if log.sample_count == 0:
        raise ValueError("failure detection needs at least one sample")
    detector = FailureDetector(log.nominal_height)
    for t, state in zip(log.times, log.states, strict=True):
        verdict = detector.update(float(t), state)
        if verdict.failed:
            return verdict
    return FailureVerdict.ok()


class RecedingHorizonPlanner:
    """Implements the ``Planner`` port with one cold solve followed by real-time iterations."""

    def __init__(
        self,
        scenario: Scenario,
        reference: BaseReference,
        deterministic: bool = True,
    ) -> None:
        self.scenario = scenario
        self.problem = QuadrupedProblem(scenario, reference)
        self.bank = make_filter_bank(scenario.shaping)
        self.solver = SlqSolver(scenario.solver)
        self.deterministic = deterministic
        self.records: list[ReplanRecord] = []
        self._previous: SolverResult | None = None
        self._sequence = 0

    @property
    def previous(self) -> SolverResult | None:
        return self._previous

    def plan(self, plant: PlantState, filter_state: FloatArray) -> PlanSnapshot:
        """Solve from the measured state; the first call iterates to convergence.

        Raises:
            DivergenceError, LinearizationError, ConstraintDegeneracyError, SynthesisError:
                Propagated from the solver.
        """
        ocp = self.problem.build(plant.time)
        if not self.scenario.shaping.is_identity:
            ocp = augment_ocp(ocp, self.scenario.shaping).ocp
        z0 = np.concatenate([plant.state, filter_state])

        started = time.perf_counter()
        if self._previous is None:
            result = self.solver.solve(ocp, z0)
        else:
            result = self.solver.mpc_step(ocp, z0, self._previous)
        elapsed = 0.0 if self.deterministic else time.perf_counter() - started

        initial_error = float(np.max(np.abs(result.trajectory.states[0] - z0)))
        self.records.append(
            ReplanRecord(
                time=plant.time,
                iterations=len(result.iterations) - 1,
                cost=result.cost,
                merit=result.merit,
                step=result.final.step,
                violation=result.final.violation,
                solve_seconds=elapsed,
                initial_state_error=initial_error,
            )
        )
        self._previous = result
        self._sequence += 1
        return PlanSnapshot(
            trajectory=result.trajectory,
            policy=result.policy,
            bank=self.bank,
            state_dim=STATE_DIM,
            sequence=self._sequence,
        )


@dataclass
class _EpisodeRecorder:
    """Row buffers of an episode, one row per simulation tick."""

    nominal_height: float
    times: list[float] = field(default_factory=list)
    states: list[FloatArray] = field(default_factory=list)
    planned_forces: list[FloatArray] = field(default_factory=list)
    commanded_forces: list[FloatArray] = field(default_factory=list)
    realized_forces: list[FloatArray] = field(default_factory=list)
    contacts: list[BoolArray] = field(default_factory=list)
    planned_heights: list[float] = field(default_factory=list)
    commanded_speeds: list[float] = field(default_factory=list)
    touchdowns: list[Touchdown] = field(default_factory=list)

    def build(self, replans: list[ReplanRecord], verdict: FailureVerdict) -> EpisodeLog:
        def rows(values: list[FloatArray], width: int) -> FloatArray:
            return np.array(values, dtype=float).reshape(-1, width)

        return EpisodeLog(
            times=np.array(self.times, dtype=float),
            states=rows(self.states, STATE_DIM),
            planned_forces=rows(self.planned_forces, 3 * LEG_COUNT),
            commanded_forces=rows(self.commanded_forces, 3 * LEG_COUNT),
            realized_forces=rows(self.realized_forces, 3 * LEG_COUNT),
            contacts=np.array(self.contacts, dtype=bool).reshape(-1, LEG_COUNT),
            planned_heights=np.array(self.planned_heights, dtype=float),
            commanded_speeds=np.array(self.commanded_speeds, dtype=float),
            replans=tuple(replans),
            touchdowns=tuple(self.touchdowns),
            verdict=verdict,
            nominal_height=self.nominal_height,
        )


class EpisodeRunner:
    """Runs one closed-loop episode of a scenario.

    In deterministic mode planning, tracking and simulation alternate on one thread: a replan
    every ``replan_period`` and a tracker and plant step every ``sim_dt``.
    """

    def __init__(self, scenario: Scenario, plant: PlantProtocol | None = None) -> None:
        self.scenario = scenario
        self.plant = plant or SimulatedPlant(
            scenario.robot, scenario.terrain, scenario.actuator, scenario.disturbance
        )
        self.tracker = TrackingController(scenario.robot, scenario.gait, scenario.tracker)
        self.initial_state = default_state(scenario.robot, scenario.base_height)
        reference = BaseReference(
            scenario.command,
            scenario.robot,
            origin=self.initial_state[3:6],
            height=scenario.base_height,
        )
        self.planner = RecedingHorizonPlanner(scenario, reference, scenario.deterministic)
        self._measurement: tuple[PlantState, FloatArray] | None = None
        self._measurement_lock = threading.Lock()

    def initial_plant(self) -> tuple[PlantState, FloatArray]:
        """Plant at rest with the actuators holding the equilibrium input, and its filter state."""
        u0 = self.planner.problem.equilibrium(0.0)
        filter_state = self.planner.bank.steady_state(u0)
        return PlantState.initial(self.initial_state, lagged_inputs=u0), filter_state

    def latest_measurement(self) -> tuple[PlantState, FloatArray] | None:
        with self._measurement_lock:
            return self._measurement

    def _publish_measurement(self, plant: PlantState, filter_state: FloatArray) -> None:
        with self._measurement_lock:
            self._measurement = (plant, filter_state)

    def _replan(self, plant: PlantState, filter_state: FloatArray) -> PlanSnapshot | FailureVerdict:
        try:
            return self.planner.plan(plant, filter_state)
        except SOLVER_ERRORS as exc:
            logger.warning(f"Solver failed at t={plant.time:.3f}: {exc}")
            return FailureVerdict.failure(FailureReason.SOLVER, plant.time, str(exc))

    def run(self) -> EpisodeLog:
        """Deterministic synchronous episode; a solver failure ends it with a partial log."""
        rates = self.scenario.rates
        plant, filter_state = self.initial_plant()
        recorder = _EpisodeRecorder(self.scenario.base_height)
        detector = FailureDetector(self.scenario.base_height)
        logger.info(
            f"Episode started: {rates.duration} s, {len(self.scenario.shaping.shaped_indices)} "
            f"shaped input(s), terrain {self.scenario.terrain.name}"
        )

        planned = self._replan(plant, filter_state)
        verdict = planned if isinstance(planned, FailureVerdict) else FailureVerdict.ok()
        for step in range(rates.step_count):
            if isinstance(planned, FailureVerdict):
                break
            if step and step % rates.steps_per_replan == 0:
                planned = self._replan(plant, filter_state)
                if isinstance(planned, FailureVerdict):
                    verdict = planned
                    break
            outcome = self._tick(planned, plant, filter_state, recorder, detector)
            if isinstance(outcome, FailureVerdict):
                verdict = outcome
                break
            plant, filter_state = outcome

        outcome_text = f"failed ({verdict.reason})" if verdict.failed else "ok"
        logger.info(f"Episode finished at t={plant.time:.3f} s: {outcome_text}")
        return recorder.build(self.planner.records, verdict)

    def _tick(
        self,
        snapshot: PlanSnapshot,
        plant: PlantState,
        filter_state: FloatArray,
        recorder: _EpisodeRecorder,
        detector: FailureDetector,
    ) -> tuple[PlantState, FloatArray] | FailureVerdict:
        dt = self.scenario.rates.sim_dt
        t = plant.time
        try:
            tracked = self.tracker.command(snapshot, plant, filter_state)
            next_plant, realized = self.plant.step(plant, tracked.command, dt)
            next_filter = self.tracker.advance_filter(snapshot, filter_state, t, dt)
        except DivergenceError as exc:
            return FailureVerdict.failure(FailureReason.NON_FINITE, t, str(exc))

        recorder.times.append(t)
        recorder.states.append(np.array(plant.state))
        recorder.planned_forces.append(tracked.planned_input[FORCES])
        recorder.commanded_forces.append(tracked.command[FORCES])
        recorder.realized_forces.append(realized)
        recorder.contacts.append(next_plant.contact)
        recorder.planned_heights.append(float(snapshot.robot_state_at(t)[5]))
        speed = self.scenario.command.forward_speed(t)
        recorder.commanded_speeds.append(speed)

        touched = next_plant.contact & ~plant.contact
        if t > 0.0 and touched.any():
            feet = foot_positions_world(next_plant.state, self.scenario.robot)
            for leg in map(int, np.flatnonzero(touched)):
                recorder.touchdowns.append(Touchdown(next_plant.time, leg, feet[leg], speed))

        verdict = detector.update(next_plant.time, next_plant.state)
        if verdict.failed:
            return verdict
        return next_plant, next_filter

    async def run_free_running(
        self, store: PlanSnapshotStoreProtocol, planner_task: PlannerTaskProtocol
    ) -> EpisodeLog:
        """Episode with the planner replanning in the background, paced to wall-clock time.

        The cold solve runs before the clock starts; afterwards the simulation reads whichever
        plan ``store`` holds at every tick. Not deterministic.
        """
        plant, filter_state = self.initial_plant()
        try:
            store.publish(self.planner.plan(plant, filter_state))
        except SOLVER_ERRORS as exc:
            verdict = FailureVerdict.failure(FailureReason.SOLVER, 0.0, str(exc))
            return _EpisodeRecorder(self.scenario.base_height).build(self.planner.records, verdict)
        self._publish_measurement(plant, filter_state)
        await planner_task.start()
        try:
            return await asyncio.to_thread(self._simulate_paced, store, plant, filter_state)
        finally:
            await planner_task.stop()

    def _simulate_paced(
        self, store: PlanSnapshotStoreProtocol, plant: PlantState, filter_state: FloatArray
    ) -> EpisodeLog:
        rates = self.scenario.rates
        recorder = _EpisodeRecorder(self.scenario.base_height)
        detector = FailureDetector(self.scenario.base_height)
        verdict = FailureVerdict.ok()
        clock_start = time.monotonic()
        active: PlanSnapshot | None = None
        for _ in range(rates.step_count):
            latest = store.latest()
            if latest is not None and (active is None or latest.sequence != active.sequence):
                active = latest
            if active is None:
                break
            try:
                outcome = self._tick(active, plant, filter_state, recorder, detector)
            except PlanExpiredError as exc:
                verdict = FailureVerdict.failure(FailureReason.SOLVER, plant.time, str(exc))
                break
            if isinstance(outcome, FailureVerdict):
                verdict = outcome
                break
            plant, filter_state = outcome
            self._publish_measurement(plant, filter_state)
            lag = plant.time - (time.monotonic() - clock_start)
            if lag > 0.0:
                time.sleep(lag)
        return recorder.build(list(self.planner.records), verdict)

