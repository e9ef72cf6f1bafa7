import os
import sys
import logging

from logging.handlers import RotatingFileHandler
from flask import Config

# Setup logger namespace
logger = logging.getLogger('console')

LOGGER_NAMES = ['chosenpath', 'harness', 'console']

SETTINGS_ENVVAR = "CHOSENPATH_SETTINGS"


def make_config():
    """Return the configuration: defaults, then the file named by CHOSENPATH_SETTINGS if set"""
    config = Config(os.path.abspath(os.path.dirname(__file__)))
    config.from_object("console.default_config")
    config.from_envvar(SETTINGS_ENVVAR, silent=True)
    return config


def setup_logging(config):
    """Route the package loggers to stderr and, if FILE_LOGGING is set, a rotating log file

    Stdout is reserved for command output.
    """
    handlers = []

    if config["CONSOLE_LOGGING"] is True:
        console_handler = logging.StreamHandler(stream=sys.stderr)
        console_handler.setFormatter(logging.Formatter(config['LOG_FORMAT']))
        handlers.append(console_handler)

    if config["FILE_LOGGING"] is True:
        if not os.path.exists(config["USER_DATA"]):
            os.makedirs(config["USER_DATA"], 0o700)
        file_handler = RotatingFileHandler(config["LOG_FILENAME"],
            maxBytes=config["LOG_MAXBYTES"], backupCount=5, delay=True)
        file_handler.setFormatter(logging.Formatter(config['LOG_FORMAT']))
        handlers.append(file_handler)

    for name in LOGGER_NAMES:
        l = logging.getLogger(name)
        del l.handlers[:]  # remove old handlers
        l.setLevel(config["LOG_LEVEL"])
        for h in handlers:
            l.addHandler(h)
        l.propagate = False
