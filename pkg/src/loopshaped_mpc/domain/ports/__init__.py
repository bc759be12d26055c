"""Ports (interfaces) for the ports-and-adapters architecture."""

from loopshaped_mpc.domain.ports.planner import Planner
from loopshaped_mpc.domain.ports.result_writer import ResultWriter

__all__ = ["Planner", "ResultWriter"]
