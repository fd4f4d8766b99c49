import logging

import pytest
import structlog
from pydantic import ValidationError

from core.config import (
    ConfigManager,
    apply_seed_override,
    experiment_from_mapping,
    load_experiment_config,
    parse_flat_mapping,
)
from core.errors import ConfigError
from core.models import ExperimentConfig, OutputFormat, RecordFile, Scheme, TrialRecord


def test_config_manager_loads_sections(config_manager, config_dir):
    config = config_manager.load_config()
    assert config.logging.level == "INFO"
    assert config.simulation.threads == 2
    assert config.simulation.format == "csv"
    assert config.validation.trials == 1000
    assert config.validation.chunk_size == 1000
    assert config.experiments_dir == "./config/experiments"
    assert config_manager.get_config() is config


def test_config_manager_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(tmp_path / "nowhere").load_config()


def test_config_manager_malformed_section(tmp_path):
    (tmp_path / "config.yaml").write_text("logging:\n  level: INFO\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigManager(tmp_path).load_config()


def test_repository_config_loads():
    config = ConfigManager().load_config()
    assert config.validation.trials == 10000
    assert config.simulation.format in ("csv", "json")


def test_parse_flat_mapping_rejects_nesting():
    assert parse_flat_mapping("m: [1, 2]\nd1: 3\n") == {"m": [1, 2], "d1": 3}
    assert parse_flat_mapping("") == {}
    with pytest.raises(ConfigError):
        parse_flat_mapping("model:\n  d1: 3\n")
    with pytest.raises(ConfigError):
        parse_flat_mapping("m: [[1, 2]]\n")
    with pytest.raises(ConfigError):
        parse_flat_mapping("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        parse_flat_mapping("m: [1, 2\n")


def test_seed_override():
    data = {"master_seed": 1}
    assert apply_seed_override(data, environ={})["master_seed"] == 1
    assert apply_seed_override(data, environ={"DCME_SEED": "42"})["master_seed"] == 42
    assert apply_seed_override(data, environ={"DCME_SEED": "0x10"})["master_seed"] == 16
    with pytest.raises(ConfigError):
        apply_seed_override(data, environ={"DCME_SEED": "forty-two"})


def test_load_experiment_config(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "scheme: two_agent_op\nd1: 2\nd2: 3\nm: 64\nbudget: [100, 200]\ntrials: 5\n",
        encoding="utf-8",
    )
    cfg = load_experiment_config(path, environ={})
    assert cfg.scheme == Scheme.TWO_AGENT_OP
    assert cfg.m == [64]
    assert cfg.budget == [100, 200]
    assert cfg.d == 5
    assert cfg.format == OutputFormat.CSV

    cfg = load_experiment_config(path, environ={"DCME_SEED": "99"})
    assert cfg.master_seed == 99


def test_experiment_config_rejects_unknown_keys_and_bad_schemes(tmp_path):
    with pytest.raises(ConfigError):
        experiment_from_mapping({"scheme": "multi_agent", "d1": 2, "m": 8, "colour": "red"})
    with pytest.raises(ConfigError):
        experiment_from_mapping({"scheme": "two_agent_op", "d1": 2, "d2": 2, "m": 8})
    with pytest.raises(ConfigError):
        experiment_from_mapping({"scheme": "interactive", "d1": 2, "m": 8, "budget": 10})
    with pytest.raises(ConfigError):
        experiment_from_mapping({"scheme": "multi_agent", "d1": 2, "m": 8, "budget": 10})
    with pytest.raises(ConfigError):
        experiment_from_mapping({"scheme": "multi_agent", "d1": 2, "d2": 2, "m": 8, "agent_dims": [1, 1]})
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "missing.yaml")


def test_experiment_config_promotes_scalars():
    cfg = ExperimentConfig(scheme="multi_agent", d1=4, m=16, levels=8, eps=0.5)
    assert cfg.m == [16] and cfg.levels == [8] and cfg.eps == [0.5]
    with pytest.raises(ValidationError):
        ExperimentConfig(scheme="multi_agent", d1=4, m=[16, 0])


def test_repository_experiment_configs_load():
    from pathlib import Path

    experiments = Path(__file__).parent.parent / "config" / "experiments"
    paths = sorted(experiments.glob("*.yaml"))
    assert paths
    for path in paths:
        load_experiment_config(path, environ={})


def test_trial_record_budget_law():
    fields = dict(scheme="two_agent_op", d1=1, d2=1, m=4, n=2, B1=10, B2=10,
                  trial=0, seed=1, dist_op=0.1, dist_fr=0.1)
    TrialRecord(bits1=10, bits2=4, error=False, **fields)
    TrialRecord(bits1=0, bits2=0, error=True, **fields)
    with pytest.raises(ValidationError):
        TrialRecord(bits1=11, bits2=4, error=False, **fields)


def test_record_file_columns_are_fixed():
    assert RecordFile().columns[0] == "scheme"
    with pytest.raises(ValidationError):
        RecordFile(columns=["scheme"])


def test_setup_logging_routes_structlog(config_manager, monkeypatch, capsys):
    from core import config as config_module

    monkeypatch.setattr(config_module, "config_manager", config_manager)
    root = logging.getLogger()
    try:
        config_module.setup_logging("DEBUG")
        assert root.level == logging.DEBUG
        structlog.get_logger("dcme.test").info("routed_event", answer=42)
        err = capsys.readouterr().err
        assert "routed_event" in err
        assert "answer=42" in err
    finally:
        for handler in root.handlers[:]:
            root.removeHandler(handler)
        root.setLevel(logging.WARNING)
