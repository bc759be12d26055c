"""Scenario loader: parsed TOML sections to a ``Scenario``."""

import logging
import math
from collections.abc import Callable
from dataclasses import fields
from typing import Any, TypeVar

import numpy as np

from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.command_profile import CommandProfile
from loopshaped_mpc.domain.models.cost_weights import CostWeights
from loopshaped_mpc.domain.models.disturbance import Disturbance
from loopshaped_mpc.domain.models.gait import GaitSchedule, SwingProfile
from loopshaped_mpc.domain.models.kinodynamic import INPUT_DIM, LEG_COUNT
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.scenario import Scenario
from loopshaped_mpc.domain.models.shaping_spec import DEFAULT_ALPHA_RATIO, ShapingSpec
from loopshaped_mpc.domain.models.solver_settings import SolverSettings
from loopshaped_mpc.domain.models.study_settings import StudySettings
from loopshaped_mpc.domain.models.terrain import TERRAIN_PRESETS, TerrainModel
from loopshaped_mpc.domain.models.tracker_gains import TrackerGains

logger = logging.getLogger(__name__)

SECTIONS = (
    "robot",
    "gait",
    "swing",
    "terrain",
    "shaping",
    "weights",
    "solver",
    "tracker",
    "actuator",
    "runtime",
    "command",
    "disturbance",
    "studies",
)

T = TypeVar("T")


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ValueError(f"TOML config '{name}' must be a table")
    return section


def _check_keys(name: str, section: dict[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ValueError(f"[{name}] has unknown key(s): {', '.join(unknown)}")


def _validated(name: str, build: Callable[[], T]) -> T:
    """Run ``build`` and name the section in any validation error it raises."""
    try:
        return build()
    except (TypeError, ValueError) as exc:
        raise ValueError(f"[{name}] {exc}") from exc


def _field_names(cls: type) -> set[str]:
    return {f.name for f in fields(cls)}


class ScenarioLoader:
    """Builds scenarios from parsed TOML; every key is optional."""

    @staticmethod
    def _build_flat(name: str, cls: type[T], section: dict[str, Any]) -> T:
        _check_keys(name, section, _field_names(cls))
        return _validated(name, lambda: cls(**section))

    @staticmethod
    def _build_robot(section: dict[str, Any]) -> RobotParams:
        _check_keys(
            "robot", section, {"mass", "inertia", "hip_offsets", "link_lengths", "stand_height"}
        )
        default = RobotParams.anymal_like(section.get("stand_height", 0.45))

        def build() -> RobotParams:
            inertia = np.asarray(section.get("inertia", default.inertia), dtype=float)
            if inertia.shape == (3,):
                inertia = np.diag(inertia)
            lengths = np.asarray(section.get("link_lengths", default.link_lengths), dtype=float)
            if lengths.shape == (3,):
                lengths = np.tile(lengths, (LEG_COUNT, 1))
            return RobotParams.with_stand_height(
                mass=float(section.get("mass", default.mass)),
                inertia=inertia,
                hip_offsets=np.asarray(
                    section.get("hip_offsets", default.hip_offsets), dtype=float
                ),
                link_lengths=lengths,
                stand_height=float(section.get("stand_height", default.stand_height)),
            )

        return _validated("robot", build)

    @staticmethod
    def _build_gait(section: dict[str, Any]) -> GaitSchedule:
        _check_keys("gait", section, {"type", *_field_names(GaitSchedule)})
        options = dict(section)
        kind = options.pop("type", "trot")
        if kind == "standing":
            options = {"duty_factor": 1.0, "offsets": (0.0,) * LEG_COUNT, **options}
        elif kind != "trot":
            raise ValueError(f"[gait] type must be 'trot' or 'standing', got {kind!r}")
        if "offsets" in options:
            options["offsets"] = tuple(options["offsets"])
        return _validated("gait", lambda: GaitSchedule(**options))

    @staticmethod
    def _build_terrain(section: dict[str, Any], friction: float) -> TerrainModel:
        _check_keys("terrain", section, {"preset", *_field_names(TerrainModel)})
        options = dict(section)
        # Without a preset, explicit spring-damper values describe custom compliant ground.
        compliant = "stiffness" in options or "damping" in options
        preset = options.pop("preset", "custom" if compliant else "rigid")
        options.setdefault("friction", friction)
        if preset == "custom":
            options.setdefault("name", "custom")
        elif preset == "rigid":
            options.setdefault("rigid", True)
            options.setdefault("name", "rigid")
        elif preset in TERRAIN_PRESETS:
            stiffness, damping = TERRAIN_PRESETS[preset]
            options.setdefault("stiffness", stiffness)
            options.setdefault("damping", damping)
            options.setdefault("name", preset)
        else:
            raise ValueError(
                f"[terrain] preset must be 'rigid', 'custom' or one of {list(TERRAIN_PRESETS)}, "
                f"got {preset!r}"
            )
        return _validated("terrain", lambda: TerrainModel(**options))

    @staticmethod
    def _build_shaping(section: dict[str, Any]) -> ShapingSpec:
        """Per-input cutoffs 1/beta in rad/s; ``inf`` leaves an input unshaped."""
        _check_keys(
            "shaping",
            section,
            {
                "cutoffs",
                "force_cutoffs",
                "force_alpha_ratio",
                "shape_joint_velocities",
                "joint_cutoff",
            },
        )
        ratio = float(section.get("force_alpha_ratio", DEFAULT_ALPHA_RATIO))

        def build() -> ShapingSpec:
            if "cutoffs" in section:
                cutoffs = [float(c) for c in section["cutoffs"]]
                if len(cutoffs) != INPUT_DIM:
                    raise ValueError(f"cutoffs needs {INPUT_DIM} values, got {len(cutoffs)}")
                return ShapingSpec.from_cutoffs(cutoffs, ratio)
            force = section.get("force_cutoffs", math.inf)
            forces = [float(force)] * (3 * LEG_COUNT) if np.isscalar(force) else list(force)
            if len(forces) != 3 * LEG_COUNT:
                raise ValueError(f"force_cutoffs needs 1 or {3 * LEG_COUNT} values")
            joint = math.inf
            if section.get("shape_joint_velocities", False):
                joint = float(section.get("joint_cutoff", 50.0))
            return ShapingSpec.from_cutoffs([*map(float, forces), *[joint] * 12], ratio)

        return _validated("shaping", build)

    @staticmethod
    def _build_disturbance(section: dict[str, Any]) -> Disturbance:
        _check_keys("disturbance", section, _field_names(Disturbance))
        options = dict(section)
        if "force" in options:
            options["force"] = np.asarray(options["force"], dtype=float)
        return _validated("disturbance", lambda: Disturbance(**options))

    @staticmethod
    def _build_studies(section: dict[str, Any], shaping: dict[str, Any]) -> StudySettings:
        _check_keys("studies", section, _field_names(StudySettings))
        options: dict[str, Any] = {
            key: tuple(value) if isinstance(value, list) else value
            for key, value in section.items()
        }
        if "analysis_pairs" in options:
            options["analysis_pairs"] = tuple(tuple(pair) for pair in options["analysis_pairs"])
        if "force_alpha_ratio" in shaping:
            options.setdefault("force_alpha_ratio", shaping["force_alpha_ratio"])
        return _validated("studies", lambda: StudySettings(**options))

    @staticmethod
    def load(data: dict[str, Any], seed: int = 0, deterministic: bool = True) -> Scenario:
        """Build the scenario described by ``data``.

        Raises:
            ValueError: If a section is malformed, has unknown keys or fails validation; the
                message names the section.
        """
        unknown = sorted(set(data) - set(SECTIONS))
        if unknown:
            raise ValueError(f"unknown configuration section(s): {', '.join(unknown)}")
        sections = {name: _section(data, name) for name in SECTIONS}
        build_flat = ScenarioLoader._build_flat
        gait = ScenarioLoader._build_gait(sections["gait"])
        components: dict[str, Any] = {
            "robot": ScenarioLoader._build_robot(sections["robot"]),
            "gait": gait,
            "swing": build_flat("swing", SwingProfile, sections["swing"]),
            "terrain": ScenarioLoader._build_terrain(sections["terrain"], gait.friction),
            "shaping": ScenarioLoader._build_shaping(sections["shaping"]),
            "weights": build_flat("weights", CostWeights, sections["weights"]),
            "solver": build_flat("solver", SolverSettings, sections["solver"]),
            "tracker": build_flat("tracker", TrackerGains, sections["tracker"]),
            "actuator": build_flat("actuator", ActuatorModel, sections["actuator"]),
            "rates": build_flat("runtime", RuntimeRates, sections["runtime"]),
            "command": build_flat("command", CommandProfile, sections["command"]),
            "disturbance": ScenarioLoader._build_disturbance(sections["disturbance"]),
            "studies": ScenarioLoader._build_studies(sections["studies"], sections["shaping"]),
            "seed": seed,
            "deterministic": deterministic,
        }
        scenario = _validated("shaping", lambda: Scenario(**components))
        logger.debug(
            f"Loaded scenario: terrain {scenario.terrain.name}, "
            f"{len(scenario.shaping.shaped_indices)} shaped input(s)"
        )
        return scenario
