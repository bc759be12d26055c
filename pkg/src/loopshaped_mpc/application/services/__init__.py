"""Application services."""

from loopshaped_mpc.application.services.mpc_runtime import (
    EpisodeRunner,
    FailureDetector,
    RecedingHorizonPlanner,
    failure_detector,
)
from loopshaped_mpc.application.services.quadruped_problem import QuadrupedProblem
from loopshaped_mpc.application.services.sim_plant import SimulatedPlant
from loopshaped_mpc.application.services.slq_solver import SlqSolver
from loopshaped_mpc.application.services.tracking_controller import TrackingController

__all__ = [
    "EpisodeRunner",
    "FailureDetector",
    "QuadrupedProblem",
    "RecedingHorizonPlanner",
    "SimulatedPlant",
    "SlqSolver",
    "TrackingController",
    "failure_detector",
]
