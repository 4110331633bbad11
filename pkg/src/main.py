import logging
import os
import sys
import tomllib
from pathlib import Path

import click
from dotenv import find_dotenv, load_dotenv

from src.Cli.router import commands
from src.constants import CONFIG_FILE, Environment
from src.utils import _match_environment

logger = logging.getLogger(__name__)

LOG_LEVELS = {0: None, 1: logging.INFO, 2: logging.DEBUG}


def load_profile(environment: Environment, config_file: Path = CONFIG_FILE) -> dict:
    """Export the shared [config] table and the chosen profile into os.environ"""
    if not config_file.exists():
        logger.warning(f"{config_file.name} not found, using built-in defaults")
        return {}
    config = tomllib.loads(config_file.read_text(encoding="utf-8"))["config"]
    values = {k: v for k, v in config.items() if not isinstance(v, dict)}
    values.update(config.get(environment.value, {}))
    for k, v in values.items():
        os.environ[k.upper()] = str(v).lower() if isinstance(v, bool) else str(v)
    return values


@click.group()
@click.option(
    "--profile",
    type=click.Choice([e.value for e in Environment]),
    default=Environment.DEVELOPMENT.value,
    show_default=True,
    help="The configuration profile to be loaded",
)
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging")
def cli(profile: str, verbose: int):
    """Multi-time path probabilities of quantum dynamic Bayesian networks"""
    load_dotenv(find_dotenv(".env", usecwd=True))
    load_profile(_match_environment(profile))
    level = LOG_LEVELS.get(min(verbose, 2)) or os.environ.get("LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


for command in commands:
    cli.add_command(command)


if __name__ == "__main__":
    cli()
