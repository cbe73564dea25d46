#!/usr/bin/env python3
"""
Tests for settings and logging setup
"""

import json
import logging

import pytest

from nubs_config import (
    DEFAULT_CONFIG,
    LOGGER_NAME,
    SEED_ENV_VAR,
    ToolkitConfig,
    default_worker_count,
    get_logger,
    setup_logging,
)


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


def test_defaults_without_file(tmp_path):
    config = ToolkitConfig(str(tmp_path / "absent.json"))
    assert config.config == DEFAULT_CONFIG
    assert "does not exist" in config.load_warning


def test_file_values_override_defaults(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"n_boot": 199, "nu_grid": [0.5, 1.5]}), encoding="utf-8")
    config = ToolkitConfig(str(path))
    assert config.load_warning is None
    assert config["n_boot"] == 199
    assert config.get("nu_grid") == [0.5, 1.5]
    assert config["restarts"] == DEFAULT_CONFIG["restarts"]
    assert config.get("unknown", "fallback") == "fallback"


def test_unreadable_file_keeps_defaults(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text("[1, 2", encoding="utf-8")
    config = ToolkitConfig(str(path))
    assert config.config == DEFAULT_CONFIG
    assert "Could not load config file" in config.load_warning


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "314")
    assert ToolkitConfig(str(tmp_path / "absent.json"))["default_seed"] == 314
    monkeypatch.setenv(SEED_ENV_VAR, "pi")
    config = ToolkitConfig(str(tmp_path / "absent.json"))
    assert config["default_seed"] == DEFAULT_CONFIG["default_seed"]
    assert SEED_ENV_VAR in config.load_warning


def test_repeated_setup_keeps_one_stream_handler():
    setup_logging("INFO")
    logger = setup_logging("DEBUG")
    assert logger.name == LOGGER_NAME
    assert logger.level == logging.DEBUG
    assert len(logger.handlers) == 1
    assert logger.propagate is False


def test_unknown_level_falls_back_to_warning():
    assert setup_logging("CHATTY").level == logging.WARNING


def test_log_file_receives_records(tmp_path):
    log_path = tmp_path / "logs" / "toolkit.log"
    logger = setup_logging("INFO", str(log_path))
    assert len(logger.handlers) == 2
    get_logger("estimation").info("fit finished")
    for handler in logger.handlers:
        handler.flush()
    assert "fit finished" in log_path.read_text(encoding="utf-8")
    setup_logging("WARNING")


def test_module_loggers_are_children():
    assert get_logger("gof").name == f"{LOGGER_NAME}.gof"


def test_worker_count():
    assert default_worker_count() >= 1
    assert default_worker_count(1) == 1
    assert default_worker_count(10 ** 6) == default_worker_count()


def test_shipped_file_matches_defaults():
    """Every shipped setting is one the toolkit reads, with its default value."""
    config = ToolkitConfig()
    assert config.load_warning is None
    with open(config.config_file, "r", encoding="utf-8") as f:
        shipped = json.load(f)
    assert shipped == DEFAULT_CONFIG
