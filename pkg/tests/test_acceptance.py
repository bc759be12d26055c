"""Desk-scale study runs; deselected by default, run with ``pytest -m acceptance``."""

import math

import pytest

from loopshaped_mpc.application.services.studies import (
    study_smoothness_sweep,
    study_terrain_grid,
    study_velocity_ramp,
)
from loopshaped_mpc.domain.models.scenario import Scenario
from loopshaped_mpc.domain.models.study_settings import StudySettings
from loopshaped_mpc.domain.models.study_table import StudyTable

pytestmark = pytest.mark.acceptance


def grid_values(table: StudyTable, terrain: str, column: str) -> dict[str, object]:
    rows = [i for i, t in enumerate(table.column("terrain")) if t == terrain]
    costs, values = table.column("cost"), table.column(column)
    return {str(costs[i]): values[i] for i in rows}


def test_lower_cutoffs_give_smoother_plans() -> None:
    """Given the 0.5 m/s trot sweep, when lowering the cutoff, then high-frequency power drops."""
    _, _, summary = study_smoothness_sweep(Scenario())

    assert set(summary.column("converged")) == {"True"}
    power = [float(p) for p in summary.column("power_fraction")]
    assert all(later < earlier for earlier, later in zip(power, power[1:], strict=False))
    corner = [float(p) for p in summary.column("power_fraction_twice_cutoff")]
    assert math.isnan(corner[0])
    assert all(0.0 <= p <= 1.0 for p in corner[1:])
    excursion = [float(h) for h in summary.column("height_peak_to_peak")]
    assert all(later >= earlier for earlier, later in zip(excursion, excursion[1:], strict=False))


@pytest.mark.asyncio
async def test_shaping_improves_force_tracking_on_soft_ground() -> None:
    """Given the terrain grid, when comparing costs on soft ground, then shaping lowers the MSE."""
    table = await study_terrain_grid(Scenario(), max_workers=4)

    soft = {cost: float(v) for cost, v in grid_values(table, "soft", "mse").items()}
    assert soft["baseline"] > soft["50"] > soft["10"]
    assert set(grid_values(table, "hard", "failed").values()) == {"False"}


def test_shaped_cost_survives_a_faster_ramp() -> None:
    """Given the velocity ramp, when comparing costs, then the shaped run reaches a higher speed."""
    _, summary = study_velocity_ramp(Scenario())

    costs = summary.column("cost")
    speeds = summary.column("failure_speed")
    assert float(speeds[costs.index("10")]) >= float(speeds[costs.index("baseline")])
    early = float(summary.column("early_width")[costs.index("10")])
    late = float(summary.column("late_width")[costs.index("10")])
    assert not math.isnan(early) and not math.isnan(late)
    assert late < early


def test_sweep_is_bit_identical_across_runs() -> None:
    """Given a short deterministic sweep, when run twice, then every cell repeats exactly."""
    scenario = Scenario(studies=StudySettings(sweep_cutoffs=(math.inf, 10.0)))

    first = study_smoothness_sweep(scenario)
    second = study_smoothness_sweep(scenario)

    for a, b in zip(first, second, strict=True):
        assert [tuple(map(repr, row)) for row in a.rows] == [
            tuple(map(repr, row)) for row in b.rows
        ]
