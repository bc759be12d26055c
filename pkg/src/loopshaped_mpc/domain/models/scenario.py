"""Complete description of an experiment run."""

from dataclasses import dataclass, field, replace

from loopshaped_mpc.domain.models.actuator_model import ActuatorModel
from loopshaped_mpc.domain.models.command_profile import CommandProfile
from loopshaped_mpc.domain.models.cost_weights import CostWeights
from loopshaped_mpc.domain.models.disturbance import Disturbance
from loopshaped_mpc.domain.models.errors import InvalidShapingSpecError
from loopshaped_mpc.domain.models.gait import GaitSchedule, SwingProfile
from loopshaped_mpc.domain.models.kinodynamic import INPUT_DIM
from loopshaped_mpc.domain.models.robot_params import RobotParams
from loopshaped_mpc.domain.models.runtime_rates import RuntimeRates
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.solver_settings import SolverSettings
from loopshaped_mpc.domain.models.study_settings import StudySettings
from loopshaped_mpc.domain.models.terrain import TerrainModel
from loopshaped_mpc.domain.models.tracker_gains import TrackerGains


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything needed to plan, simulate or study one configuration, and nothing else."""

    robot: RobotParams = field(default_factory=RobotParams.anymal_like)
    gait: GaitSchedule = field(default_factory=GaitSchedule.trot)
    swing: SwingProfile = field(default_factory=SwingProfile)
    terrain: TerrainModel = field(default_factory=TerrainModel.rigid_ground)
    shaping: ShapingSpec = field(default_factory=lambda: ShapingSpec.identity(INPUT_DIM))
    weights: CostWeights = field(default_factory=CostWeights)
    solver: SolverSettings = field(default_factory=SolverSettings)
    tracker: TrackerGains = field(default_factory=TrackerGains)
    actuator: ActuatorModel = field(default_factory=ActuatorModel)
    rates: RuntimeRates = field(default_factory=RuntimeRates)
    command: CommandProfile = field(default_factory=CommandProfile)
    disturbance: Disturbance = field(default_factory=Disturbance.none)
    studies: StudySettings = field(default_factory=StudySettings)
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self) -> None:
        if len(self.shaping) != INPUT_DIM:
            raise InvalidShapingSpecError(
                f"shaping spec has {len(self.shaping)} channels, the model has {INPUT_DIM} inputs"
            )

    @property
    def base_height(self) -> float:
        if self.command.base_height is not None:
            return self.command.base_height
        return self.robot.stand_height

    def with_changes(self, **changes: object) -> "Scenario":
        return replace(self, **changes)  # type: ignore[arg-type]
