"""
Configuration management for the DCME toolkit.
Loads runtime settings from YAML and experiment sweeps from flat key-value files.
"""

import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import structlog
import yaml
from pydantic import ValidationError

from .errors import ConfigError
from .models import ExperimentConfig

SEED_ENV_VAR = "DCME_SEED"


@dataclass
class LoggingConfig:
    """Logging configuration settings."""
    level: str
    format: str
    file: Optional[str] = None


@dataclass
class SimulationConfig:
    """Defaults for `dcme simulate`."""
    threads: int
    output_dir: str
    format: str


@dataclass
class ValidationConfig:
    """Defaults for `dcme validate`."""
    trials: int
    seed: int
    chunk_size: int = 1000


@dataclass
class Config:
    """Main configuration class containing all settings."""
    logging: LoggingConfig
    simulation: SimulationConfig
    validation: ValidationConfig
    experiments_dir: str = "./config/experiments"


class ConfigManager:
    """Manages configuration loading and validation."""

    def __init__(self, config_dir: Union[str, Path, None] = None):
        if config_dir is None:
            config_dir = Path(__file__).resolve().parents[2] / "config"
        self.config_dir = Path(config_dir)
        self._config: Optional[Config] = None

    def load_config(self) -> Config:
        """Load configuration from config.yaml."""
        if self._config is not None:
            return self._config

        config_file = self.config_dir / "config.yaml"
        if not config_file.exists():
            raise ConfigError(f"Configuration file not found: {config_file}")

        with open(config_file, "r", encoding="utf-8") as f:
            config_data = yaml.safe_load(f) or {}

        try:
            self._config = Config(
                logging=LoggingConfig(**config_data["logging"]),
                simulation=SimulationConfig(**config_data["simulation"]),
                validation=ValidationConfig(**config_data["validation"]),
                experiments_dir=config_data.get("experiments_dir", "./config/experiments"),
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Malformed configuration in {config_file}: {e}") from e

        return self._config

    def get_config(self) -> Config:
        """Get the current configuration, loading it if necessary."""
        if self._config is None:
            return self.load_config()
        return self._config


def parse_flat_mapping(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse a flat key-value YAML document (scalars and lists of scalars only)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{source}: not valid YAML: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a key-value mapping at top level")

    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"{source}: key '{key}' is nested; experiment configs are flat")
        if isinstance(value, list) and any(isinstance(v, (list, dict)) for v in value):
            raise ConfigError(f"{source}: key '{key}' must be a list of scalars")
    return data


def apply_seed_override(data: Dict[str, Any], environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """Apply the DCME_SEED environment override to a raw experiment mapping."""
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return data
    try:
        seed = int(raw, 0)
    except ValueError as e:
        raise ConfigError(f"{SEED_ENV_VAR}={raw!r} is not an integer") from e
    return {**data, "master_seed": seed}


def experiment_from_mapping(data: Dict[str, Any], source: str = "<mapping>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: invalid experiment config:\n{e}") from e


def load_experiment_config(path: Union[str, Path],
                           environ: Optional[Dict[str, str]] = None) -> ExperimentConfig:
    """Load and validate an experiment config file, honouring DCME_SEED."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Experiment config not found: {path}")
    data = parse_flat_mapping(path.read_text(encoding="utf-8"), source=str(path))
    data = apply_seed_override(data, environ)
    return experiment_from_mapping(data, source=str(path))


# Global configuration manager instance
config_manager = ConfigManager()


def get_config() -> Config:
    """Get the global configuration instance."""
    return config_manager.get_config()


def setup_logging(level: Optional[str] = None):
    """Setup stdlib handlers from configuration and route structlog through them."""
    config = get_config()

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.logging.file:
        log_file = Path(config.logging.file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, (level or config.logging.level).upper()),
        format=config.logging.format,
        handlers=handlers,
        force=True,
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    return structlog.get_logger(__name__)
