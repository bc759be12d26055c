"""Desk-scale studies: smoothness sweep, terrain grid, velocity ramp and loopshaping analysis.

Every study is a pure function of its scenario and returns ``StudyTable`` objects with a fixed
column set. Published reference values are carried along for the reports only; they come from
a different robot and are never compared against.
"""

import asyncio
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from loopshaped_mpc.application.services.gait_planner import stance_mask
from loopshaped_mpc.application.services.loopshaping import (
    augment_ocp,
    augmented_initial_state,
    shaped_input_weight,
)
from loopshaped_mpc.application.services.metrics import episode_metrics, spectral_power_above
from loopshaped_mpc.application.services.mpc_runtime import SOLVER_ERRORS, EpisodeRunner
from loopshaped_mpc.application.services.quadruped_model import default_state
from loopshaped_mpc.application.services.quadruped_problem import QuadrupedProblem
from loopshaped_mpc.application.services.robust_analysis import (
    default_frequency_grid,
    loop_gain_compare,
)
from loopshaped_mpc.application.services.slq_solver import SlqSolver
from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.command_profile import CommandProfile
from loopshaped_mpc.domain.models.episode_log import REPLAN_COLUMNS, EpisodeLog
from loopshaped_mpc.domain.models.errors import MisalignedSeriesError
from loopshaped_mpc.domain.models.kinodynamic import FORCES, INPUT_DIM, LEG_COUNT, STATE_DIM
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.scenario import Scenario
from loopshaped_mpc.domain.models.shaping_spec import ShapingChannel, ShapingSpec
from loopshaped_mpc.domain.models.solver_result import ITERATION_COLUMNS, SolverResult
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization
from loopshaped_mpc.domain.models.study_settings import cutoff_label
from loopshaped_mpc.domain.models.study_table import Cell, StudyTable
from loopshaped_mpc.domain.models.terrain import TerrainModel

logger = logging.getLogger(__name__)

PUBLISHED_LABEL = "published reference, different plant"

# (terrain, cost) -> (MAE N, MSE N^2)
PUBLISHED_SIMULATION: dict[tuple[str, str], tuple[float, float]] = {
    ("hard", "baseline"): (4.8, 303.5),
    ("hard", "50"): (3.6, 58.5),
    ("hard", "10"): (5.0, 104.2),
    ("medium", "baseline"): (5.5, 316.2),
    ("medium", "50"): (4.6, 110.1),
    ("medium", "10"): (5.0, 100.4),
    ("soft", "baseline"): (13.5, 525.5),
    ("soft", "50"): (11.6, 286.9),
    ("soft", "10"): (7.4, 146.5),
}
PUBLISHED_HARDWARE: dict[tuple[str, str], tuple[float, float]] = {
    ("hard", "baseline"): (27.1, 1465.7),
    ("hard", "50"): (14.7, 785.5),
    ("hard", "10"): (12.7, 641.4),
    ("medium", "baseline"): (21.4, 1040.1),
    ("medium", "50"): (19.7, 741.3),
    ("medium", "10"): (16.0, 555.4),
    ("soft", "baseline"): (30.9, 2308.1),
    ("soft", "50"): (26.0, 1237.5),
    ("soft", "10"): (22.0, 824.3),
}
PUBLISHED_FAILURE_SPEEDS: dict[str, float] = {"baseline": 0.6, "10": 0.9}

PLAN_ITERATION_COLUMNS = ITERATION_COLUMNS
EPISODE_STEP_COLUMNS = (
    "time",
    "x",
    "y",
    "z",
    "roll",
    "pitch",
    "yaw",
    "planned_height",
    *(f"planned_fz_{leg}" for leg in range(LEG_COUNT)),
    *(f"realized_fz_{leg}" for leg in range(LEG_COUNT)),
    *(f"contact_{leg}" for leg in range(LEG_COUNT)),
    "commanded_speed",
)
EPISODE_REPLAN_COLUMNS = REPLAN_COLUMNS
SWEEP_GRF_COLUMNS = ("cost", "time", *(f"fz_{leg}" for leg in range(LEG_COUNT)))
SWEEP_HEIGHT_COLUMNS = ("cost", "time", "base_height")
SWEEP_SUMMARY_COLUMNS = (
    "cost",
    "converged",
    "iterations",
    "objective",
    "power_fraction",
    "power_fraction_twice_cutoff",
    "height_peak_to_peak",
    "switch_jump_ratio",
    "liftoff_force",
    "error",
)
GRID_COLUMNS = (
    "terrain",
    "cost",
    "mae",
    "mse",
    "failed",
    "failure_time",
    "published_sim_mae",
    "published_sim_mse",
    "published_hw_mae",
    "published_hw_mse",
)
RAMP_TOUCHDOWN_COLUMNS = ("cost", "time", "leg", "x", "y", "z", "commanded_speed")
RAMP_SUMMARY_COLUMNS = (
    "cost",
    "failed",
    "failure_speed",
    "early_width",
    "late_width",
    "published_failure_speed",
)
ANALYSIS_WEIGHT_COLUMNS = ("alpha", "beta", "omega", "normalized_weight")
ANALYSIS_LOOP_COLUMNS = (
    "omega",
    "baseline_magnitude",
    "shaped_magnitude",
    "baseline_margin",
    "shaped_margin",
)

_EDGE_FRACTION = 0.25


@dataclass(frozen=True, eq=False)
class OpenLoopPlan:
    """Converged open-loop solve with the plant inputs recovered from the auxiliary inputs.

    ``plant_inputs`` are the means over each hold interval, the values the constraints hold.
    """

    result: SolverResult
    plant_inputs: FloatArray  # (N, 24)
    filter_states: FloatArray  # (N + 1, n_s)

    @property
    def times(self) -> FloatArray:
        return self.result.trajectory.times

    @property
    def robot_states(self) -> FloatArray:
        return self.result.trajectory.states[:, :STATE_DIM]

    def normal_forces(self) -> FloatArray:
        """Planned z-force of every leg on every input node, (N, 4)."""
        return self.plant_inputs[:, FORCES].reshape(-1, LEG_COUNT, 3)[:, :, 2]


def force_shaping(scenario: Scenario, cutoff: float) -> ShapingSpec:
    """The scenario's shaping with every contact-force channel set to corner ``cutoff``."""
    force = ShapingChannel.from_cutoff(cutoff, scenario.studies.force_alpha_ratio)
    channels = list(scenario.shaping.channels)
    channels[FORCES] = [force] * (3 * LEG_COUNT)
    return ShapingSpec(tuple(channels))


def solve_open_loop(scenario: Scenario) -> OpenLoopPlan:
    """Solve one horizon from the standing state to convergence with the scenario's shaping.

    Raises:
        DivergenceError, LinearizationError, ConstraintDegeneracyError, SynthesisError:
            Propagated from the solver.
    """
    problem = QuadrupedProblem(scenario)
    ocp = problem.build(0.0)
    x0 = default_state(scenario.robot, scenario.base_height)
    u0 = problem.equilibrium(0.0)
    solver = SlqSolver(scenario.solver)
    if scenario.shaping.is_identity:
        result = solver.solve(ocp, x0)
        empty = np.zeros((result.trajectory.times.size, 0))
        return OpenLoopPlan(result, np.array(result.trajectory.inputs), empty)

    augmented = augment_ocp(ocp, scenario.shaping)
    result = solver.solve(augmented.ocp, augmented_initial_state(augmented, x0, u0))
    states = result.trajectory.states
    inputs = augmented.recover_mean(states[:-1], result.trajectory.inputs)
    return OpenLoopPlan(result, np.asarray(inputs), np.array(states[:, STATE_DIM:]))


def plan_tables(scenario: Scenario, plan: OpenLoopPlan) -> tuple[StudyTable, StudyTable]:
    """Planned trajectory (states, recovered inputs, filter states) and the iteration log."""
    n_s = plan.filter_states.shape[1]
    columns = (
        "time",
        *(f"x{i}" for i in range(STATE_DIM)),
        *(f"u{i}" for i in range(INPUT_DIM)),
        *(f"xs{i}" for i in range(n_s)),
    )
    # The input of the last node is held from the interval before it.
    inputs = np.vstack([plan.plant_inputs, plan.plant_inputs[-1:]])
    rows = tuple(
        (float(t), *map(float, x), *map(float, u), *map(float, s))
        for t, x, u, s in zip(
            plan.times, plan.robot_states, inputs, plan.filter_states, strict=True
        )
    )
    trajectory = StudyTable("plan_trajectory", columns, rows)
    iterations = StudyTable(
        "plan_iterations",
        PLAN_ITERATION_COLUMNS,
        tuple(record.as_row() for record in plan.result.iterations),
        (("shaped_inputs", str(len(scenario.shaping.shaped_indices))),),
    )
    return trajectory, iterations


def episode_tables(log: EpisodeLog) -> tuple[StudyTable, StudyTable]:
    """Per-step and per-replan tables of a closed-loop episode."""
    steps = tuple(
        (
            float(t),
            *map(float, state[3:6]),
            *map(float, state[0:3]),
            float(height),
            *map(float, planned[2::3]),
            *map(float, realized[2::3]),
            *map(int, contacts),
            float(speed),
        )
        for t, state, height, planned, realized, contacts, speed in zip(
            log.times,
            log.states,
            log.planned_heights,
            log.planned_forces,
            log.realized_forces,
            log.contacts,
            log.commanded_speeds,
            strict=True,
        )
    )
    verdict = log.verdict
    metadata = (("failed", str(verdict.failed)), ("failure_reason", str(verdict.reason or "")))
    return (
        StudyTable("episode_steps", EPISODE_STEP_COLUMNS, steps, metadata),
        StudyTable(
            "episode_replans", EPISODE_REPLAN_COLUMNS, tuple(r.as_row() for r in log.replans)
        ),
    )


def _switch_jump_ratio(forces: FloatArray) -> float:
    """Largest node-to-node z-force change relative to the peak force, over all legs."""
    peak = float(np.max(np.abs(forces)))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(np.diff(forces, axis=0))) / peak)


def _mean_power_above(forces: FloatArray, sample_rate: float, cutoff: float) -> float:
    """Leg-averaged power fraction above ``cutoff`` rad/s, NaN past the Nyquist frequency."""
    if not math.isfinite(cutoff) or cutoff > math.pi * sample_rate:
        return math.nan
    fractions = [
        spectral_power_above(forces[:, leg], sample_rate, cutoff) for leg in range(LEG_COUNT)
    ]
    return float(np.mean(fractions))


def _liftoff_force(scenario: Scenario, times: FloatArray, forces: FloatArray) -> float:
    """Largest |z-force| on the last stance interval before any lift-off in the plan."""
    gait = scenario.gait
    stance = np.stack([stance_mask(gait, float(t)) for t in times])
    liftoff = stance[:-1] & ~stance[1:]
    values = np.abs(forces[: liftoff.shape[0]][liftoff])
    return float(values.max()) if values.size else math.nan


def study_smoothness_sweep(scenario: Scenario) -> tuple[StudyTable, StudyTable, StudyTable]:
    """Open-loop trot plans for every sweep cutoff with the forward speed of the sweep.

    Returns the planned z-forces over one gait cycle, the planned base heights and a summary.
    Solver failures are reported in the summary with the error text.
    """
    studies = scenario.studies
    base = scenario.with_changes(
        command=CommandProfile(
            forward_velocity=studies.sweep_velocity, base_height=scenario.command.base_height
        ),
    )
    period = scenario.gait.period
    grf_rows: list[tuple[Cell, ...]] = []
    height_rows: list[tuple[Cell, ...]] = []
    summary_rows: list[tuple[Cell, ...]] = []
    for cutoff in studies.sweep_cutoffs:
        label = cutoff_label(cutoff)
        cell = base.with_changes(shaping=force_shaping(base, cutoff))
        try:
            plan = solve_open_loop(cell)
        except SOLVER_ERRORS as exc:
            logger.warning(f"Sweep cost {label} failed: {exc}")
            summary_rows.append((label, "False", 0, *[math.nan] * 6, str(exc)))
            continue

        times = plan.times
        forces = plan.normal_forces()
        node_times = times[:-1]
        cycle = node_times <= node_times[0] + period
        grf_rows.extend(
            (label, float(t), *map(float, f))
            for t, f in zip(node_times[cycle], forces[cycle], strict=True)
        )
        heights = plan.robot_states[:, 5]
        height_rows.extend((label, float(t), float(z)) for t, z in zip(times, heights, strict=True))

        sample_rate = 1.0 / float(times[1] - times[0])
        power = _mean_power_above(forces, sample_rate, studies.sweep_power_cutoff)
        corner_power = _mean_power_above(forces, sample_rate, 2.0 * cutoff)
        result = plan.result
        summary_rows.append(
            (
                label,
                str(result.converged),
                len(result.iterations) - 1,
                result.cost,
                power,
                corner_power,
                float(np.ptp(heights)),
                _switch_jump_ratio(forces),
                _liftoff_force(cell, node_times, forces),
                "",
            )
        )
        logger.info(f"Sweep cost {label}: power fraction {power:.4f}")

    metadata = (
        ("sweep_velocity", f"{studies.sweep_velocity:g}"),
        ("power_cutoff", f"{studies.sweep_power_cutoff:g}"),
    )
    return (
        StudyTable("sweep_grf", SWEEP_GRF_COLUMNS, tuple(grf_rows), metadata),
        StudyTable("sweep_base_height", SWEEP_HEIGHT_COLUMNS, tuple(height_rows), metadata),
        StudyTable("sweep_summary", SWEEP_SUMMARY_COLUMNS, tuple(summary_rows), metadata),
    )


def _grid_cell(scenario: Scenario, terrain_name: str, cutoff: float) -> tuple[Cell, ...]:
    studies = scenario.studies
    period = scenario.gait.period
    settle = studies.grid_settle_cycles * period
    cell = scenario.with_changes(
        terrain=TerrainModel.preset(terrain_name, friction=scenario.gait.friction),
        shaping=force_shaping(scenario, cutoff),
        command=CommandProfile(base_height=scenario.command.base_height),
        rates=_with_duration(scenario, settle + studies.grid_cycles * period),
    )
    log = EpisodeRunner(cell).run()
    label = cutoff_label(cutoff)
    mae = mse = math.nan
    try:
        report = episode_metrics(log, start=settle)
        mae, mse = report.mae, report.mse
    except MisalignedSeriesError:
        logger.warning(f"Grid cell {terrain_name}/{label} ended before the metrics window")
    verdict = log.verdict
    sim = PUBLISHED_SIMULATION.get((terrain_name, label), (math.nan, math.nan))
    hardware = PUBLISHED_HARDWARE.get((terrain_name, label), (math.nan, math.nan))
    logger.info(f"Grid cell {terrain_name}/{label}: MAE {mae:.3f} N, MSE {mse:.3f} N^2")
    return (
        terrain_name,
        label,
        mae,
        mse,
        str(verdict.failed),
        math.nan if verdict.time is None else verdict.time,
        *sim,
        *hardware,
    )


def _with_duration(scenario: Scenario, duration: float) -> RuntimeRates:
    return replace(scenario.rates, duration=duration)


async def study_terrain_grid(scenario: Scenario, max_workers: int = 1) -> StudyTable:
    """Closed-loop trot in place on every (terrain, cost) cell, metrics after the settle cycles.

    Cells are independent deterministic episodes run on worker threads, at most ``max_workers``
    at a time; rows come back in (terrain, cost) order whatever the completion order.
    """
    if max_workers < 1:
        raise ValueError(f"max_workers must be at least 1, got {max_workers}")
    studies = scenario.studies
    semaphore = asyncio.Semaphore(max_workers)

    async def run_cell(terrain_name: str, cutoff: float) -> tuple[Cell, ...]:
        async with semaphore:
            return await asyncio.to_thread(_grid_cell, scenario, terrain_name, cutoff)

    cells = [(t, c) for t in studies.grid_terrains for c in studies.grid_cutoffs]
    rows = await asyncio.gather(*(run_cell(t, c) for t, c in cells))
    metadata = (
        ("published_reference", PUBLISHED_LABEL),
        ("cycles", str(studies.grid_cycles)),
        ("settle_cycles", str(studies.grid_settle_cycles)),
    )
    return StudyTable("grid_metrics", GRID_COLUMNS, tuple(rows), metadata)


def _lateral_width(log: EpisodeLog, start: float, end: float) -> float:
    """Mean |y| of the touchdowns between ``start`` and ``end``."""
    widths = [abs(float(t.position[1])) for t in log.touchdowns if start <= t.time <= end]
    return float(np.mean(widths)) if widths else math.nan


def study_velocity_ramp(scenario: Scenario) -> tuple[StudyTable, StudyTable]:
    """Closed-loop trot with a forward speed ramp from rest until failure or the ramp's end.

    Returns every touchdown and, per cost, the failure speed together with the mean lateral foot
    placement width over the first and the last quarter of the run.
    """
    studies = scenario.studies
    touchdown_rows: list[tuple[Cell, ...]] = []
    summary_rows: list[tuple[Cell, ...]] = []
    for cutoff in studies.ramp_cutoffs:
        label = cutoff_label(cutoff)
        cell = scenario.with_changes(
            shaping=force_shaping(scenario, cutoff),
            command=CommandProfile(
                acceleration=studies.ramp_acceleration,
                base_height=scenario.command.base_height,
            ),
            rates=_with_duration(scenario, studies.ramp_duration),
        )
        log = EpisodeRunner(cell).run()
        touchdown_rows.extend(
            (
                label,
                t.time,
                t.leg,
                *map(float, t.position),
                t.commanded_speed,
            )
            for t in log.touchdowns
        )
        end = float(log.times[-1]) if log.sample_count else 0.0
        report = _failure_speed(log)
        summary_rows.append(
            (
                label,
                str(log.verdict.failed),
                report,
                _lateral_width(log, 0.0, _EDGE_FRACTION * end),
                _lateral_width(log, (1.0 - _EDGE_FRACTION) * end, end),
                PUBLISHED_FAILURE_SPEEDS.get(label, math.nan),
            )
        )
        logger.info(f"Ramp cost {label}: failed={log.verdict.failed} at speed {report:.3f} m/s")

    metadata = (
        ("published_reference", PUBLISHED_LABEL),
        ("acceleration", f"{studies.ramp_acceleration:g}"),
    )
    return (
        StudyTable("ramp_touchdowns", RAMP_TOUCHDOWN_COLUMNS, tuple(touchdown_rows), metadata),
        StudyTable("ramp_summary", RAMP_SUMMARY_COLUMNS, tuple(summary_rows), metadata),
    )


def _failure_speed(log: EpisodeLog) -> float:
    """Commanded speed at failure; the last commanded speed when the run survived."""
    if not log.sample_count:
        return 0.0
    return float(log.commanded_speeds[-1])


def double_integrator() -> StateSpaceRealization:
    """SISO demo plant 1/s^2 with the full state as output."""
    return StateSpaceRealization(
        a=np.array([[0.0, 1.0], [0.0, 0.0]]),
        b=np.array([[0.0], [1.0]]),
        c=np.eye(2),
        d=np.zeros((2, 1)),
    )


def study_loopshaping_analysis(
    scenario: Scenario, frequencies: FloatArray | None = None
) -> tuple[StudyTable, StudyTable]:
    """Normalized shaped weight |r(jw)|^2 of every analysis pair and the LQR loop comparison.

    The loop comparison uses the double integrator with Q = I and the first analysis pair.
    """
    studies = scenario.studies
    grid = default_frequency_grid() if frequencies is None else np.asarray(frequencies)
    weight = studies.analysis_input_weight
    r = np.array([[weight]])
    weight_rows: list[tuple[Cell, ...]] = []
    for alpha, beta in studies.analysis_pairs:
        spec = ShapingSpec.from_pairs([(alpha, beta)])
        normalized = [shaped_input_weight(spec, r, float(w)).real[0, 0] / weight for w in grid]
        weight_rows.extend(
            (alpha, beta, float(omega), float(value))
            for omega, value in zip(grid, normalized, strict=True)
        )

    alpha, beta = studies.analysis_pairs[0]
    baseline, shaped = loop_gain_compare(
        double_integrator(), np.eye(2), r, ShapingSpec.from_pairs([(alpha, beta)]), grid
    )
    loop_rows = tuple(
        (float(omega), float(gb), float(gs), float(mb), float(ms))
        for omega, gb, gs, mb, ms in zip(
            grid,
            baseline.magnitudes(),
            shaped.magnitudes(),
            baseline.margins,
            shaped.margins,
            strict=True,
        )
    )
    metadata = (("input_weight", f"{weight:g}"), ("loop_pair", f"{alpha:g},{beta:g}"))
    return (
        StudyTable("analysis_weights", ANALYSIS_WEIGHT_COLUMNS, tuple(weight_rows), metadata),
        StudyTable("analysis_loop_gain", ANALYSIS_LOOP_COLUMNS, loop_rows, metadata),
    )
