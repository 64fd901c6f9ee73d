"""
Runtime settings shared by the library entry points and the CLI
"""

import os
import logging
import argparse
from typing import Union

from .exceptions import ConfigError

TAIL_CHOICES = ("0", "1", "interval")


class Config:
    """ Numeric defaults and process settings. Values are read from the
    environment first (TREECAP_THREADS, TREECAP_LOG_LEVEL) and may then be
    overridden from command line arguments with make_config_from_args(). """

    def __init__(self, **overrides):
        self.p: float = 2.0
        self.tol: float = 1e-9
        self.depth: int = 24
        self.tail: str = "interval"
        self.threads: int = _env_int("TREECAP_THREADS", 1)
        self.loglevel: Union[int, str] = os.environ.get("TREECAP_LOG_LEVEL", "WARNING")
        self.max_edges: int = 2_000_000
        self.oracle_tol: float = 1e-6
        self.oracle_max_iter: int = 2000
        self.svg_scale: float = 300.0
        self.svg_stroke: float = 1.0
        self.output_format: str = "json"

        for key, value in overrides.items():
            if not hasattr(self, key):
                raise ConfigError(f"unknown setting {key!r}")
            setattr(self, key, value)

    def validate(self) -> "Config":
        if not self.p > 1:
            raise ConfigError(f"p must be > 1, got {self.p}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.depth < 1:
            raise ConfigError(f"depth must be a positive integer, got {self.depth}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.tail not in TAIL_CHOICES:
            raise ConfigError(f"tail must be one of {', '.join(TAIL_CHOICES)}")
        if self.output_format not in ("json", "human"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        return self

    def apply_logging(self) -> logging.Logger:
        """ Sets the level of the package logger. Handlers are left to the
        embedding application (the CLI adds a stderr handler). """
        logger = logging.getLogger("TreeCap")
        level = self.loglevel.upper() if isinstance(self.loglevel, str) else self.loglevel
        try:
            logger.setLevel(level)
        except (ValueError, TypeError):
            raise ConfigError(f"invalid log level {self.loglevel!r}")
        return logger


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {value!r}")


# options whose destination differs from the Config attribute name
_ARG_TO_SETTING = {
    "log_level": "loglevel",
    "format": "output_format",
    "scale": "svg_scale",
    "stroke": "svg_stroke",
    "max_iter": "oracle_max_iter",
}


def make_config_from_args(args: argparse.Namespace, sentinel: object, config: Config = None) -> Config:
    """ Overrides a given config's items if they were specified on the command line.
    Options the user did not pass carry the sentinel and leave the config untouched. """
    config = config if config is not None else Config()

    for name, value in vars(args).items():
        if value is sentinel:
            continue
        setting = _ARG_TO_SETTING.get(name, name)
        if hasattr(config, setting):
            setattr(config, setting, value)

    return config.validate()
