#!/usr/bin/env python3
"""
Configuration and logging for the nu-Birnbaum-Saunders toolkit
Loads JSON settings over built-in defaults and wires up the application logger
"""

import os
import json
import logging
from pathlib import Path
from typing import Dict, Any, Optional

# Check availability of optional dependencies without importing
psutil_available = True
try:
    import importlib.util
    _psutil_spec = importlib.util.find_spec("psutil")
    if _psutil_spec is None:
        psutil_available = False
except ImportError:
    psutil_available = False


TOOL_VERSION = "1.0.0"
LOGGER_NAME = "NuBsToolkit"
SEED_ENV_VAR = "NUBS_SEED"

PROJECT_ROOT = Path(__file__).parent.parent
DEFAULT_CONFIG_FILE = PROJECT_ROOT / "config" / "nubs_config.json"

DEFAULT_CONFIG: Dict[str, Any] = {
    "log_level": "WARNING",
    "log_file": None,
    "default_seed": 20240101,
    "n_boot": 999,
    "moment_nodes": 64,
    "max_iterations": 4000,
    "rel_tolerance": 1e-10,
    "score_tolerance": 1e-4,
    "restarts": 3,
    "init_strategy": "grid",
    "nu_grid": [0.25, 0.5, 1.0, 2.0, 4.0],
    "max_workers": 8,
}


class ToolkitConfig:
    """Settings merged from defaults, a JSON file and the environment."""

    def __init__(self, config_file: Optional[str] = None) -> None:
        self.config_file = Path(config_file) if config_file else DEFAULT_CONFIG_FILE
        self.config: Dict[str, Any] = dict(DEFAULT_CONFIG)
        self.load_warning: Optional[str] = None

        # Load configuration if available
        try:
            if self.config_file.exists():
                with open(self.config_file, "r", encoding="utf-8") as f:
                    loaded_config = json.load(f)
                    self.config.update(loaded_config)
            elif config_file:
                self.load_warning = f"config file {self.config_file} does not exist"
        except Exception as e:
            self.load_warning = f"Could not load config file {self.config_file}: {e}"

        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed:
            try:
                self.config["default_seed"] = int(env_seed)
            except ValueError:
                self.load_warning = f"ignoring non-integer {SEED_ENV_VAR}={env_seed!r}"

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def __getitem__(self, key: str) -> Any:
        return self.config[key]

    def setup_logging(self, level: Optional[str] = None) -> logging.Logger:
        """Setup logging configuration."""
        return setup_logging(level or self.config.get("log_level", "WARNING"),
                             self.config.get("log_file"))


def setup_logging(log_level: str = "WARNING", log_file: Optional[str] = None) -> logging.Logger:
    """Configure the application logger: stderr always, a log file when asked."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, str(log_level).upper(), logging.WARNING))

    # Repeated setup (tests, several CLI runs in one process) replaces handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if log_file:
        log_path = Path(log_file)
        if not log_path.is_absolute():
            log_path = PROJECT_ROOT / log_path
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def get_logger(module: str) -> logging.Logger:
    """Child logger named channel.module, e.g. NuBsToolkit.estimation."""
    return logging.getLogger(f"{LOGGER_NAME}.{module}")


def default_worker_count(max_workers: Optional[int] = None) -> int:
    """Physical core count when psutil is present, else os.cpu_count()."""
    count: Optional[int] = None
    if psutil_available:
        try:
            import psutil  # type: ignore
            count = psutil.cpu_count(logical=False)
        except Exception:
            count = None
    if not count:
        count = os.cpu_count() or 1
    if max_workers is not None:
        count = min(count, max_workers)
    return max(1, int(count))
