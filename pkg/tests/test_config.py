"""Tests for the persisted command defaults."""

import json
import logging
from pathlib import Path

import pytest

from pess_solver.config import (
    CONFIG_FILE_PATH,
    DEFAULT_RUNS,
    DEFAULT_TIME_BUDGET,
    BenchConfig,
    get_default_config,
)


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    monkeypatch.setenv("PESS_SOLVER_CONFIG", str(path))
    return path


class TestBenchConfig:
    """BenchConfig loading and saving."""

    def test_defaults(self):
        config = BenchConfig()
        assert config.time_budget == DEFAULT_TIME_BUDGET
        assert config.runs == DEFAULT_RUNS
        assert config.s_iter == 700
        assert config.c == 7.0
        assert config.theta == 0.8
        assert config.l_cut == 4.0
        assert config.init_density == 0.6
        assert config.policy == "adaptive"
        assert config.records_path is None
        assert config.long_run is False

    def test_path_precedence(self, config_path, tmp_path):
        assert BenchConfig.get_config_path() == config_path
        assert BenchConfig.get_config_path(str(tmp_path / "x.json")) == tmp_path / "x.json"

    def test_default_path_without_environment(self, monkeypatch):
        monkeypatch.delenv("PESS_SOLVER_CONFIG", raising=False)
        assert BenchConfig.get_config_path() == CONFIG_FILE_PATH

    def test_missing_file_gives_defaults(self, config_path):
        assert not config_path.exists()
        assert get_default_config().to_dict() == BenchConfig().to_dict()

    def test_save_and_load(self, config_path):
        BenchConfig(runs=10, policy="fixed", records_path="records.csv").save_to_file(config_path)
        loaded = BenchConfig.load_from_file(config_path)
        assert loaded.runs == 10
        assert loaded.policy == "fixed-interval"
        assert loaded.records_path == "records.csv"

    def test_partial_file(self, config_path):
        config_path.write_text(json.dumps({"time_budget": 5}))
        loaded = BenchConfig.load_from_file(config_path)
        assert loaded.time_budget == 5.0
        assert loaded.runs == DEFAULT_RUNS

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"policy": "sometimes"}'])
    def test_invalid_file_falls_back(self, config_path, caplog, text):
        config_path.write_text(text)
        with caplog.at_level(logging.WARNING, logger="pess_solver.config"):
            loaded = BenchConfig.load_from_file(config_path)
        assert loaded.to_dict() == BenchConfig().to_dict()
        assert "Failed to load config file" in caplog.text

    def test_set_value(self):
        config = BenchConfig()
        config.set_value("theta", "0.5")
        config.set_value("long_run", "yes")
        config.set_value("policy", "every")
        assert config.theta == 0.5
        assert config.long_run is True
        assert config.policy == "every-iteration"

    def test_set_value_errors(self):
        config = BenchConfig()
        with pytest.raises(KeyError):
            config.set_value("colour", "blue")
        with pytest.raises(ValueError):
            config.set_value("workers", "two")

    def test_repository_defaults_match(self):
        """The config.json shipped with the sources holds the built-in defaults."""
        shipped = Path(__file__).resolve().parents[1] / "config.json"
        assert json.loads(shipped.read_text()) == BenchConfig().to_dict()
