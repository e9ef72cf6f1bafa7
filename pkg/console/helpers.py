import json
import logging

from console import logger, setup_logging


def configure_app(config, args):
    """ Configures the run from command-line arguments, sets up logging and logs the configuration.

    Args:
        config: A flask Config object
        args: The args-object as returned by ArgumentParser.parse_args()
    """

    _configure_from_args(config, args)
    setup_logging(config)
    _log_config_info(config, args)


def _configure_from_args(config, args):
    """ Configures config with argparse arguments args.

    Args:
        config: A flask Config object
        args: The args-object as returned by ArgumentParser.parse_args()
    """

    config["COMMAND"] = args.command

    if getattr(args, "debug", False) is True:
        config["LOG_LEVEL"] = logging.DEBUG
        config["DEBUG"] = True

    if getattr(args, "seed", None) is not None:
        config["SEED"] = args.seed

    if getattr(args, "reps", None) is not None:
        config["REPETITIONS"] = args.reps

    if getattr(args, "frontier_cap", None) is not None:
        config["FRONTIER_CAP"] = args.frontier_cap

    if getattr(args, "resolution", None) is not None:
        config["GRID_RESOLUTION"] = args.resolution


def _log_config_info(config, args):
    """ Logs the configuration to the console logger.

    Args:
        config: A flask Config object
        args: The args-object as returned by ArgumentParser.parse_args()
    """

    logger.info(
        "\n".join(["{:=^80}".format(" CHOSENPATH CONFIGURATION "),
                   "{:>12}: {}".format("command", config["COMMAND"]),
                   "{:>12}: {}".format("version", config["VERSION"]),
                   "{:>12}: {}".format("seed", config["SEED"]),
                   "{:>12}: {}".format("repetitions", config["REPETITIONS"] or "ceil(log2 n) + 2"),
                   "{:>12}: {}".format("frontier", config["FRONTIER_CAP"]),
                   "{:>12}: {}".format("log file", config["LOG_FILENAME"] if config["FILE_LOGGING"] else "disabled")]))


def run_metadata(config, command, parameters):
    """Return the record header every report starts with: command, version, seed and parameters"""
    return {
        "command": command,
        "version": config["VERSION"],
        "seed": config["SEED"],
        "parameters": parameters,
    }


def json_line(record):
    """Serialize a record as one line of JSON with sorted keys"""
    return json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"
