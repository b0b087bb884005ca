"""Rydberg cross-Kerr toolkit CLI."""

import os

import click

from .campaign_commands import analyze, simulate
from .common import get_version
from .model_commands import convert, spectrum, xphase


@click.group()
@click.version_option(version=get_version(), prog_name="rydkerr")
@click.option(
  "--config",
  envvar="RYDKERR_CONFIG",
  help="Run config file (also: RYDKERR_CONFIG env var)",
  metavar="PATH",
  type=click.Path(dir_okay=False),
)
@click.option(
  "--config-dir",
  envvar="RYDKERR_CONFIG_DIR",
  help="Directory for configuration files (also: RYDKERR_CONFIG_DIR env var)",
  metavar="PATH",
)
@click.pass_context
def main(ctx: click.Context, config: str | None, config_dir: str | None) -> None:
  """
  Rydberg EIT cross-Kerr toolkit

  Model, simulate and analyze the cross-phase a signal beam writes on an EIT
  probe through van der Waals interactions between Rydberg polaritons.

  \b
  Configuration:
  A TOML run config sets species, medium, duty cycle, sweep and analysis.
  • RYDKERR_CONFIG_DIR: Directory for config files (default: OS app data dir + /rydkerr/)
  • RYDKERR_CONFIG: Run config (default: <config_dir>/rydkerr.toml, built-in defaults if absent)
  • RYDKERR_OUTPUT_DIR: Result directory (default: ./rydkerr-out)

  \b
  Quick Start:
  1. rydkerr spectrum --n 68            # EIT spectrum and group delay
  2. rydkerr xphase --n 68 --calibrated # Cross-phase by every model route
  3. rydkerr simulate --seed 1          # Synthetic campaign
  4. rydkerr analyze rydkerr-out/sweep.csv

  \b
  Common Commands:
  • rydkerr convert --experiment-defaults
  • rydkerr convert --table
  """
  ctx.ensure_object(dict)
  ctx.obj["config"] = config

  # config.py reads the directory from the environment
  if config_dir:
    os.environ["RYDKERR_CONFIG_DIR"] = config_dir


main.add_command(spectrum)
main.add_command(xphase)
main.add_command(convert)
main.add_command(simulate)
main.add_command(analyze)


# Export the main function
__all__ = ["main"]
