"""Configuration file and logging setup for the condrenyi command line tool"""

from __future__ import annotations

import contextlib
import copy
import logging
import pathlib
import plistlib
from typing import Any

import click

from .optimize import OptimizerConfig

APP_NAME = "condrenyi"

# where to store the config file, will reside in click's application directory for APP_NAME
CONFIG_FILE = f"{APP_NAME}.plist"

# log file for debug output, written only when debug is set in the config file
LOG_FILE = f"{APP_NAME}.log"

DEFAULT_CONFIG: dict[str, Any] = {
    "debug": False,
    "workers": 1,
    "trials": 200,
    "seed": 0,
    "optimizer": OptimizerConfig().asdict(),
}

logger = logging.getLogger(__name__)


def app_dir() -> pathlib.Path:
    return pathlib.Path(click.get_app_dir(APP_NAME))


def config_path(path: str | pathlib.Path | None = None) -> pathlib.Path:
    return pathlib.Path(path) if path else app_dir() / CONFIG_FILE


def load_config(path: str | pathlib.Path | None = None) -> dict[str, Any]:
    """Load config from the plist file, falling back to defaults

    A missing or malformed file gives the defaults; keys missing from the file take their
    default values. The optimizer table is merged key by key.
    """
    loaded: dict[str, Any] = {}
    with contextlib.suppress(FileNotFoundError, IsADirectoryError):
        with open(config_path(path), "rb") as f:
            with contextlib.suppress(Exception):
                # don't crash if config file is malformed
                loaded = plistlib.load(f)
    if not isinstance(loaded, dict):
        loaded = {}
    config = copy.deepcopy(DEFAULT_CONFIG)
    optimizer = loaded.pop("optimizer", {})
    config.update(loaded)
    if isinstance(optimizer, dict):
        config["optimizer"].update(optimizer)
    logger.debug(f"load_config: {config=}")
    return config


def save_config(config: dict[str, Any], path: str | pathlib.Path | None = None) -> pathlib.Path:
    """Write config to the plist file, creating the application directory if needed"""
    path = config_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb+") as f:
        plistlib.dump(config, f)
    logger.debug(f"save_config: saved {config=} to {path}")
    return path


def optimizer_config(config: dict[str, Any]) -> OptimizerConfig:
    return OptimizerConfig.from_dict(config.get("optimizer", {}))


def configure_logging(debug: bool, log_to_file: bool = False) -> None:
    """Send package log records to stderr, at DEBUG level when debug is set

    With log_to_file, records are also appended to LOG_FILE in the application directory.
    """
    package = logging.getLogger(APP_NAME)
    package.setLevel(logging.DEBUG if debug else logging.WARNING)
    # handlers bind sys.stderr when created, so rebuild them on every call
    for handler in list(package.handlers):
        package.removeHandler(handler)
        handler.close()
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package.addHandler(handler)
    if log_to_file:
        directory = app_dir()
        directory.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(directory / LOG_FILE, encoding="utf-8")
        handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(message)s"))
        package.addHandler(handler)
