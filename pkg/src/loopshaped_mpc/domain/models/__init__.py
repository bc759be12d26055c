"""Domain models for loopshaped MPC."""

from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.augmented_ocp import AugmentedOcp
from loopshaped_mpc.domain.models.command_profile import CommandProfile
from loopshaped_mpc.domain.models.cost_weights import CostWeights
from loopshaped_mpc.domain.models.disturbance import Disturbance
from loopshaped_mpc.domain.models.episode_log import EpisodeLog, ReplanRecord, Touchdown
from loopshaped_mpc.domain.models.errors import (
    ChartError,
    ConstraintDegeneracyError,
    DimensionMismatchError,
    DivergenceError,
    EvaluationAtPoleError,
    ExtrapolationError,
    InvalidShapingSpecError,
    LinearizationError,
    LoopshapedMpcError,
    MisalignedSeriesError,
    PlanExpiredError,
    SynthesisError,
    UnsupportedStructureError,
)
from loopshaped_mpc.domain.models.failure_verdict import FailureReason, FailureVerdict
from loopshaped_mpc.domain.models.filter_bank import FilterBank
from loopshaped_mpc.domain.models.gait import GaitSchedule, LegMode, ModeInfo, SwingProfile
from loopshaped_mpc.domain.models.kinodynamic import KinodynInput, KinodynState
from loopshaped_mpc.domain.models.loop_analysis import LoopAnalysis
from loopshaped_mpc.domain.models.lq_approximation import LqApproximation, NodeConstraint
from loopshaped_mpc.domain.models.metrics_report import MetricsReport
from loopshaped_mpc.domain.models.ocp import OcpDefinition
from loopshaped_mpc.domain.models.plan_snapshot import PlanSnapshot
from loopshaped_mpc.domain.models.plant_state import PlantState
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.scenario import Scenario
from loopshaped_mpc.domain.models.shaping_spec import ShapingChannel, ShapingSpec
from loopshaped_mpc.domain.models.solver_result import IterationRecord, SolverResult
from loopshaped_mpc.domain.models.solver_settings import SolverSettings
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization
from loopshaped_mpc.domain.models.study_settings import StudySettings
from loopshaped_mpc.domain.models.study_table import StudyTable
from loopshaped_mpc.domain.models.terrain import TerrainModel
from loopshaped_mpc.domain.models.tracker_gains import TrackerGains
from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory
from loopshaped_mpc.domain.models.transfer_function import RationalTransferFunction

__all__ = [
    "ActuatorModel",
    "AugmentedOcp",
    "ChartError",
    "CommandProfile",
    "ConstraintDegeneracyError",
    "CostWeights",
    "DimensionMismatchError",
    "Disturbance",
    "DivergenceError",
    "EpisodeLog",
    "EvaluationAtPoleError",
    "ExtrapolationError",
    "FailureReason",
    "FailureVerdict",
    "FeedbackPolicy",
    "FilterBank",
    "GaitSchedule",
    "InvalidShapingSpecError",
    "IterationRecord",
    "KinodynInput",
    "KinodynState",
    "LegMode",
    "LinearizationError",
    "LoopAnalysis",
    "LoopshapedMpcError",
    "LqApproximation",
    "MetricsReport",
    "MisalignedSeriesError",
    "ModeInfo",
    "NodeConstraint",
    "OcpDefinition",
    "PlanExpiredError",
    "PlanSnapshot",
    "PlantState",
    "RationalTransferFunction",
    "ReplanRecord",
    "RobotParams",
    "RuntimeRates",
    "Scenario",
    "ShapingChannel",
    "ShapingSpec",
    "SolverResult",
    "SolverSettings",
    "StateSpaceRealization",
    "StudySettings",
    "StudyTable",
    "SwingProfile",
    "SynthesisError",
    "TerrainModel",
    "Touchdown",
    "TrackerGains",
    "Trajectory",
    "UnsupportedStructureError",
]
