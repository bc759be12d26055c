"""12-factor configuration adapter using environment variables and a TOML scenario file."""

import tomllib
from pathlib import Path
from typing import Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _parse_override_value(raw: str) -> Any:
    """Parse ``raw`` as a TOML value, falling back to the raw string."""
    try:
        return tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        return raw


def apply_overrides(data: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply dotted ``section.key=value`` overrides to parsed TOML data in place.

    Raises:
        ValueError: If an override has no ``=`` or no dotted key, or walks into a non-table.
    """
    for override in overrides:
        key, separator, raw = override.partition("=")
        path = [part.strip() for part in key.split(".")]
        if not separator or len(path) < 2 or not all(path):
            raise ValueError(f"override must look like section.key=value, got {override!r}")
        table = data
        for part in path[:-1]:
            table = table.setdefault(part, {})
            if not isinstance(table, dict):
                raise ValueError(f"override {override!r} walks into the non-table key {part!r}")
        table[path[-1]] = _parse_override_value(raw.strip())
    return data


class AppConfig(BaseSettings):
    """Application configuration following 12-factor principles."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Scenario file; every section is optional and an empty file is the default scenario.
    config_file: str | None = Field(
        default="config.example.toml",
        description="Path to the TOML scenario file",
    )
    out_dir: str = Field(default="results", description="Directory receiving the CSV tables")
    seed: int = Field(default=0, description="Seed recorded with every run")
    deterministic: bool = Field(
        default=True,
        description="Replan synchronously and report zero solve times for bit-identical output",
    )
    log_level: str = Field(default="INFO", description="DEBUG, INFO, WARNING or ERROR")
    max_workers: int = Field(default=1, ge=1, description="Terrain grid cells run in parallel")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        return v.upper()

    @classmethod
    def for_testing(cls, **kwargs: Any) -> "AppConfig":
        """Create an AppConfig instance without loading the .env file.

        Args:
            **kwargs: Any parameters to pass to AppConfig constructor

        Returns:
            AppConfig instance with .env file loading disabled
        """

        class TestAppConfig(cls):  # type: ignore[misc, valid-type]
            model_config = SettingsConfigDict(
                env_file=None,
                env_file_encoding="utf-8",
                case_sensitive=False,
                extra="ignore",
            )

        return TestAppConfig(**kwargs)

    def load_scenario_data(self, overrides: list[str] | None = None) -> dict[str, Any]:
        """Parse the scenario file and apply dotted overrides.

        Raises:
            ValueError: If ``config_file`` is unset or an override is malformed.
            FileNotFoundError: If the scenario file does not exist.
        """
        if not self.config_file:
            raise ValueError("config_file must be set to load the scenario")

        config_path = Path(self.config_file)
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, "rb") as f:
            data = tomllib.load(f)
        return apply_overrides(data, overrides or [])
