"""Configuration for the pess-solver command line."""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from .packing.lbfgs import MaintenancePolicy

logger = logging.getLogger(__name__)

# Desk-scale defaults
DEFAULT_TIME_BUDGET = 60.0  # seconds per run
DEFAULT_RUNS = 3
DEFAULT_S_ITER = 700
DEFAULT_C = 7.0
DEFAULT_THETA = 0.8
DEFAULT_L_CUT = 4.0
DEFAULT_INIT_DENSITY = 0.6
DEFAULT_WORKERS = 1
DEFAULT_OUT_DIR = "pess-results"
DEFAULT_POLICY = MaintenancePolicy.ADAPTIVE.value

# Configuration file path
CONFIG_FILE_PATH = Path.home() / ".pess-solver" / "config.json"
ENV_CONFIG_PATH = "PESS_SOLVER_CONFIG"

# Setting name -> converter for values given on the command line.
_CONVERTERS = {
    "time_budget": float,
    "runs": int,
    "s_iter": int,
    "c": float,
    "theta": float,
    "l_cut": float,
    "init_density": float,
    "workers": int,
    "out_dir": str,
    "records_path": str,
    "long_run": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
    "policy": lambda v: MaintenancePolicy.normalize(v).value,
}


class BenchConfig:
    """Defaults of the benchmark commands, persisted as JSON."""

    def __init__(
        self,
        time_budget: Optional[float] = None,
        runs: Optional[int] = None,
        s_iter: Optional[int] = None,
        c: Optional[float] = None,
        theta: Optional[float] = None,
        l_cut: Optional[float] = None,
        init_density: Optional[float] = None,
        workers: Optional[int] = None,
        out_dir: Optional[str] = None,
        records_path: Optional[str] = None,
        long_run: Optional[bool] = None,
        policy: Optional[str] = None,
    ):
        self.time_budget = float(time_budget) if time_budget is not None else DEFAULT_TIME_BUDGET
        self.runs = int(runs) if runs is not None else DEFAULT_RUNS
        self.s_iter = int(s_iter) if s_iter is not None else DEFAULT_S_ITER
        self.c = float(c) if c is not None else DEFAULT_C
        self.theta = float(theta) if theta is not None else DEFAULT_THETA
        self.l_cut = float(l_cut) if l_cut is not None else DEFAULT_L_CUT
        self.init_density = float(init_density) if init_density is not None else DEFAULT_INIT_DENSITY
        self.workers = int(workers) if workers is not None else DEFAULT_WORKERS
        # Expand ~ in paths if present
        self.out_dir = os.path.expanduser(out_dir) if out_dir else DEFAULT_OUT_DIR
        self.records_path = os.path.expanduser(records_path) if records_path else None
        self.long_run = bool(long_run) if long_run is not None else False
        self.policy = MaintenancePolicy.normalize(policy or DEFAULT_POLICY).value

    @staticmethod
    def get_config_path(custom_path: Optional[str] = None) -> Path:
        """Get configuration file path (argument, then environment, then default)."""
        if custom_path:
            return Path(custom_path).expanduser()
        env_path = os.environ.get(ENV_CONFIG_PATH)
        if env_path:
            return Path(env_path).expanduser()
        return CONFIG_FILE_PATH

    @classmethod
    def load_from_file(cls, config_path: Optional[Path] = None) -> "BenchConfig":
        """Load configuration from JSON file."""
        if config_path is None:
            config_path = cls.get_config_path()

        if not config_path.exists():
            return cls()

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                config_data = json.load(f)
            if not isinstance(config_data, dict):
                raise ValueError("top level must be a JSON object")
            return cls(**{key: config_data.get(key) for key in _CONVERTERS})
        except (json.JSONDecodeError, IOError, TypeError, ValueError) as e:
            # If config file is invalid, log warning and use defaults
            logger.warning(f"Failed to load config file {config_path}: {e}")
            return cls()

    def save_to_file(self, config_path: Optional[Path] = None) -> None:
        """Save configuration to JSON file."""
        if config_path is None:
            config_path = self.get_config_path()

        # Ensure config directory exists
        config_path.parent.mkdir(parents=True, exist_ok=True)

        try:
            with open(config_path, "w", encoding="utf-8") as f:
                json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
        except IOError as e:
            logger.error(f"Failed to save config file {config_path}: {e}")

    def set_value(self, key: str, value: str) -> None:
        """Set one setting from its command-line text.

        Raises:
            KeyError: If ``key`` is not a setting.
            ValueError: If ``value`` does not convert.
        """
        if key not in _CONVERTERS:
            raise KeyError(key)
        setattr(self, key, _CONVERTERS[key](value))

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            "time_budget": self.time_budget,
            "runs": self.runs,
            "s_iter": self.s_iter,
            "c": self.c,
            "theta": self.theta,
            "l_cut": self.l_cut,
            "init_density": self.init_density,
            "workers": self.workers,
            "out_dir": self.out_dir,
            "records_path": self.records_path,
            "long_run": self.long_run,
            "policy": self.policy,
        }


def get_default_config() -> BenchConfig:
    """Load the configuration from the default location."""
    return BenchConfig.load_from_file()
