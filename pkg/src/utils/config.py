"""Configuration management for the reconstruction toolkit."""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppConfig(BaseSettings):
    """Application configuration."""
    name: str = "GRAND Graph Reconstruction"
    version: str = "0.1.0"
    environment: str = "development"


class TopologicalConfig(BaseSettings):
    """Topological attack configuration."""
    max_combination_degree: int = Field(default=2, ge=0)
    max_iterations: int = Field(default=10_000, ge=1)


class SpectralSettings(BaseSettings):
    """Spectral attack configuration."""
    alpha: Optional[float] = Field(default=None, ge=0.0)
    beta: Union[float, Literal["auto"]] = "auto"
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    eigenvalue_floor: float = Field(default=1e-9, ge=0.0)
    beta_convention: Literal["vertices", "normalized"] = "vertices"

    @field_validator("beta", mode="before")
    @classmethod
    def parse_beta(cls, v):
        """Accept 'auto' or any non-negative number."""
        if isinstance(v, str) and v.strip().lower() != "auto":
            v = float(v)
        if isinstance(v, (int, float)) and v < 0:
            raise ValueError("beta must be non-negative")
        return v


class CosquareConfig(BaseSettings):
    """Co-square instantiation configuration."""
    budget: int = Field(default=20, ge=0)


class PipelineConfig(BaseSettings):
    """Pipeline configuration."""
    spectral_rounds: int = Field(default=1, ge=1)
    fill: Literal["zero", "one"] = "zero"


class SweepConfig(BaseSettings):
    """Experiment sweep configuration."""
    rhos: List[float] = [0.0, 0.2, 0.4, 0.6, 0.8]
    n_seeds: int = 10
    base_seed: int = 0
    max_completions: int = Field(default=256, ge=1)  # co-square completions scored per run


class LoggingConfig(BaseSettings):
    """Logging configuration."""
    level: str = "INFO"
    format: str = "json"
    output: List[str] = ["console"]
    file_path: str = "./logs/grand.log"
    max_file_size_mb: int = 50
    backup_count: int = 5


class PerformanceConfig(BaseSettings):
    """Performance configuration."""
    parallel_processing: bool = False
    max_workers: int = 4


class Config(BaseSettings):
    """Main configuration class."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="allow",
    )

    app: AppConfig = Field(default_factory=AppConfig)
    topological: TopologicalConfig = Field(default_factory=TopologicalConfig)
    spectral: SpectralSettings = Field(default_factory=SpectralSettings)
    cosquare: CosquareConfig = Field(default_factory=CosquareConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    performance: PerformanceConfig = Field(default_factory=PerformanceConfig)

    @classmethod
    def load_from_yaml(
        cls, config_path: str = "config/config.yaml", environment: Optional[str] = None
    ) -> "Config":
        """
        Load configuration from a YAML file and its environment overlay.

        ``config.<environment>.yaml`` next to the base file is merged over it
        when present; the environment defaults to ``$ENVIRONMENT`` or
        ``development``.

        Raises:
            FileNotFoundError: If the base file does not exist
        """
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        data = _read_yaml(config_file)
        environment = environment or os.getenv("ENVIRONMENT", "development")
        overlay = config_file.parent / f"config.{environment}.yaml"
        if overlay.exists():
            data = _deep_merge(data, _read_yaml(overlay))

        return cls(**data)


def _read_yaml(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge ``override`` into a copy of ``base``; nested sections merge key by key."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(merged.get(key), dict) and isinstance(value, dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


# Global configuration instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance, falling back to defaults without a file."""
    global _config

    if _config is None:
        config_path = os.getenv("CONFIG_PATH", "config/config.yaml")
        if Path(config_path).exists():
            _config = Config.load_from_yaml(config_path)
        else:
            _config = Config()

    return _config


def set_config(config: Optional[Config]) -> None:
    """Set the global configuration instance (None resets to lazy loading)."""
    global _config
    _config = config
