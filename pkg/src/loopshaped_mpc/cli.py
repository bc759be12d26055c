"""Command-line front end: configuration, study dispatch and result output."""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from typing import TYPE_CHECKING, Any

from loopshaped_mpc.adapters.config import AppConfig, ScenarioLoader
from loopshaped_mpc.adapters.csv import CsvResultWriter
from loopshaped_mpc.adapters.formatters import format_grid_summary, format_table
from loopshaped_mpc.adapters.runtime import FreeRunningPlanner, InMemorySnapshotStore
from loopshaped_mpc.application.services.metrics import episode_metrics
from loopshaped_mpc.application.services.mpc_runtime import EpisodeRunner
from loopshaped_mpc.application.services.studies import (
    episode_tables,
    plan_tables,
    solve_open_loop,
    study_loopshaping_analysis,
    study_smoothness_sweep,
    study_terrain_grid,
    study_velocity_ramp,
)
from loopshaped_mpc.domain.models.errors import LoopshapedMpcError
from loopshaped_mpc.domain.models.study_table import StudyTable

if TYPE_CHECKING:
    from loopshaped_mpc.domain.models.episode_log import EpisodeLog
    from loopshaped_mpc.domain.models.metrics_report import MetricsReport
    from loopshaped_mpc.domain.models.scenario import Scenario
    from loopshaped_mpc.domain.ports.result_writer import ResultWriter

logger = logging.getLogger(__name__)


def _setup_argparse() -> argparse.ArgumentParser:
    """Set up and configure argument parser."""
    parser = argparse.ArgumentParser(
        prog="loopshaped-mpc",
        description="Frequency-shaped trajectory optimization and MPC studies for a quadruped",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Open-loop trot plan with the configured shaping
  loopshaped-mpc --config config.example.toml plan

  # One closed-loop episode on soft ground with force cutoffs at 10 rad/s
  loopshaped-mpc --set terrain.preset='"soft"' --set shaping.force_cutoffs=10 simulate

  # Terrain x cost grid on four worker threads
  loopshaped-mpc --max-workers 4 grid
        """,
    )
    parser.add_argument("--config", dest="config_file", help="TOML scenario file")
    parser.add_argument("--out-dir", help="Directory receiving the CSV tables")
    parser.add_argument("--seed", type=int, help="Seed recorded with the run")
    parser.add_argument(
        "--deterministic",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Synchronous replanning with bit-identical output (default: on)",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override one scenario key; the value is parsed as TOML (repeatable)",
    )
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--max-workers", type=int, help="Parallel terrain grid cells")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")
    subparsers.add_parser("plan", help="Open-loop solve from the standing state")
    subparsers.add_parser("simulate", help="One closed-loop episode")
    subparsers.add_parser("sweep", help="Smoothness sweep over force cutoffs")
    subparsers.add_parser("grid", help="Terrain x cost force-tracking grid")
    subparsers.add_parser("ramp", help="Forward velocity ramp until failure")
    subparsers.add_parser("analyze", help="Shaped weight and loop-gain tables")
    return parser


def _app_config(args: argparse.Namespace) -> AppConfig:
    """AppConfig from the environment with command-line values taking precedence."""
    names = ("config_file", "out_dir", "seed", "deterministic", "log_level", "max_workers")
    given = {name: getattr(args, name) for name in names if getattr(args, name) is not None}
    return AppConfig(**given)


def _flatten(data: dict[str, Any], prefix: str = "") -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    for key in sorted(data):
        value = data[key]
        if isinstance(value, dict):
            pairs.extend(_flatten(value, f"{prefix}{key}."))
        else:
            pairs.append((f"{prefix}{key}", json.dumps(value)))
    return pairs


def config_metadata(config: AppConfig, data: dict[str, Any]) -> tuple[tuple[str, str], ...]:
    """Effective configuration echoed into every output file header."""
    return (
        ("config_file", str(config.config_file)),
        ("seed", str(config.seed)),
        ("deterministic", str(config.deterministic).lower()),
        *_flatten(data),
    )


class _Session:
    """Scenario, writer and header metadata shared by the command handlers."""

    def __init__(self, config: AppConfig, overrides: list[str]) -> None:
        data = config.load_scenario_data(overrides)
        self.config = config
        self.scenario: Scenario = ScenarioLoader.load(data, config.seed, config.deterministic)
        self.writer: ResultWriter = CsvResultWriter(config.out_dir)
        self.metadata = config_metadata(config, data)

    def write(self, table: StudyTable, file_name: str | None = None) -> None:
        self.writer.write(table.with_metadata(self.metadata), file_name or f"{table.name}.csv")


async def _handle_plan(session: _Session) -> None:
    plan = await asyncio.to_thread(solve_open_loop, session.scenario)
    for table in plan_tables(session.scenario, plan):
        session.write(table)
    result = plan.result
    print(
        f"converged={result.converged} iterations={len(result.iterations) - 1} "
        f"cost={result.cost:.6g} violation={result.final.violation:.3g}"
    )


async def _run_episode(scenario: Scenario) -> EpisodeLog:
    runner = EpisodeRunner(scenario)
    if not scenario.rates.free_running:
        return await asyncio.to_thread(runner.run)
    if scenario.deterministic:
        logger.warning("Free-running episodes are not deterministic")
    store = InMemorySnapshotStore()
    planner_task = FreeRunningPlanner(
        runner.planner, runner.latest_measurement, store, scenario.rates.replan_period
    )
    return await runner.run_free_running(store, planner_task)


async def _handle_simulate(session: _Session) -> None:
    log = await _run_episode(session.scenario)
    for table in episode_tables(log):
        session.write(table)
    verdict = log.verdict
    status = f"failed ({verdict.reason} at t={verdict.time:.3f} s)" if verdict.failed else "ok"
    print(f"episode {status}, {log.sample_count} samples, {len(log.replans)} replans")
    if log.sample_count > 1:
        report = episode_metrics(log, power_cutoff=session.scenario.studies.sweep_power_cutoff)
        rows = tuple((name, float(value)) for name, value in _report_values(report))
        print(format_table(StudyTable("metrics", ("metric", "value"), rows)))


def _report_values(report: MetricsReport) -> list[tuple[str, float]]:
    values = [("mae", report.mae), ("mse", report.mse)]
    values += [(f"mae_leg_{leg}", v) for leg, v in enumerate(report.leg_mae)]
    for name in ("high_frequency_fraction", "base_height_min", "base_height_max"):
        if getattr(report, name) is not None:
            values.append((name, getattr(report, name)))
    return values


async def _handle_sweep(session: _Session) -> None:
    tables = await asyncio.to_thread(study_smoothness_sweep, session.scenario)
    for table in tables:
        session.write(table)
    summary = tables[-1]
    print(format_table(summary, tuple(c for c in summary.columns if c != "error")))


async def _handle_grid(session: _Session) -> None:
    table = await study_terrain_grid(session.scenario, session.config.max_workers)
    session.write(table)
    print(format_grid_summary(table))


async def _handle_ramp(session: _Session) -> None:
    touchdowns, summary = await asyncio.to_thread(study_velocity_ramp, session.scenario)
    session.write(touchdowns)
    session.write(summary)
    print(format_table(summary))


async def _handle_analyze(session: _Session) -> None:
    weights, loop_gain = study_loopshaping_analysis(session.scenario)
    session.write(weights)
    session.write(loop_gain)
    print(f"{len(weights.rows)} weight samples, {len(loop_gain.rows)} loop-gain samples")


async def _execute_cli_command(command: str, session: _Session) -> None:
    """Execute the handler of ``command``."""
    command_handlers = {
        "plan": _handle_plan,
        "simulate": _handle_simulate,
        "sweep": _handle_sweep,
        "grid": _handle_grid,
        "ramp": _handle_ramp,
        "analyze": _handle_analyze,
    }
    await command_handlers[command](session)


def error_line(error: BaseException) -> str:
    """Machine-readable one-line error report."""
    payload = {"type": type(error).__name__, "message": str(error)}
    return f"error: {json.dumps(payload)}"


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


async def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point; returns the process exit status."""
    parser = _setup_argparse()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 1

    try:
        config = _app_config(args)
        _configure_logging(config.log_level)
        session = _Session(config, args.overrides)
        await _execute_cli_command(args.command, session)
    except (LoopshapedMpcError, ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(error_line(e), file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\nInterrupted.", file=sys.stderr)
        return 1
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    """Synchronous entry point for the CLI command."""
    return asyncio.run(main(argv))
