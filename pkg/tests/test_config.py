"""Test the config file and logging setup"""

import logging
import plistlib

from condrenyi.config import (
    APP_NAME,
    CONFIG_FILE,
    DEFAULT_CONFIG,
    LOG_FILE,
    app_dir,
    config_path,
    configure_logging,
    load_config,
    optimizer_config,
    save_config,
)


def test_defaults_without_file(config_file):
    """Test a missing config file gives the defaults"""
    assert load_config(config_file) == DEFAULT_CONFIG


def test_malformed_file(config_file):
    """Test a malformed config file gives the defaults"""
    config_file.write_bytes(b"not a plist")
    assert load_config(config_file) == DEFAULT_CONFIG


def test_save_load(config_file):
    """Test saved values are read back and missing keys take defaults"""
    config = load_config(config_file)
    config["trials"] = 17
    config["optimizer"]["restarts"] = 5
    assert save_config(config, config_file) == config_file
    loaded = load_config(config_file)
    assert loaded["trials"] == 17
    assert loaded["optimizer"]["restarts"] == 5
    assert loaded["seed"] == DEFAULT_CONFIG["seed"]


def test_partial_optimizer_table(config_file):
    """Test the optimizer table is merged key by key"""
    with open(config_file, "wb") as f:
        plistlib.dump({"optimizer": {"step_rule": "backtracking"}, "workers": 4}, f)
    config = load_config(config_file)
    assert config["workers"] == 4
    assert config["optimizer"]["step_rule"] == "backtracking"
    assert config["optimizer"]["max_iterations"] == DEFAULT_CONFIG["optimizer"]["max_iterations"]
    assert optimizer_config(config).step_rule == "backtracking"


def test_defaults_not_mutated(config_file):
    config = load_config(config_file)
    config["optimizer"]["restarts"] = 99
    assert DEFAULT_CONFIG["optimizer"]["restarts"] == 3


def test_default_location():
    """Test the config file lives in the application directory"""
    assert config_path() == app_dir() / CONFIG_FILE
    assert APP_NAME in str(app_dir()).lower()


def test_configure_logging():
    """Test the level follows debug and handlers are replaced, not stacked"""
    logger = logging.getLogger(APP_NAME)
    configure_logging(False)
    assert logger.level == logging.WARNING
    configure_logging(True)
    assert logger.level == logging.DEBUG
    assert len(logger.handlers) == 1


def test_configure_logging_to_file():
    configure_logging(True, log_to_file=True)
    logging.getLogger(f"{APP_NAME}.tests").debug("hello")
    for handler in logging.getLogger(APP_NAME).handlers:
        handler.flush()
    assert "hello" in (app_dir() / LOG_FILE).read_text()
    configure_logging(False)
