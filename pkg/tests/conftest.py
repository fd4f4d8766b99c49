"""Shared fixtures; puts src/ on sys.path the way the scripts do."""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from core.config import ConfigManager  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xDC3E)


@pytest.fixture
def config_dir(tmp_path: Path) -> Path:
    (tmp_path / "config.yaml").write_text(
        "logging:\n"
        "  level: INFO\n"
        "  format: '%(levelname)s %(message)s'\n"
        "simulation:\n"
        "  threads: 2\n"
        f"  output_dir: '{tmp_path / 'results'}'\n"
        "  format: csv\n"
        "validation:\n"
        "  trials: 1000\n"
        "  seed: 3\n",
        encoding="utf-8",
    )
    return tmp_path


@pytest.fixture
def config_manager(config_dir: Path) -> ConfigManager:
    return ConfigManager(config_dir)
