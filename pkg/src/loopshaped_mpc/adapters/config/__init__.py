"""Configuration adapters."""

from loopshaped_mpc.adapters.config.app_config import AppConfig, apply_overrides
from loopshaped_mpc.adapters.config.scenario_loader import ScenarioLoader

__all__ = ["AppConfig", "ScenarioLoader", "apply_overrides"]
