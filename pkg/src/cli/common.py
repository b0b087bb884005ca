"""Common utilities for CLI commands."""

import functools
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, TypeVar

import click

from ..config import ConfigError, Overrides, RunConfig, get_run_config_path, load_run_config
from ..core.errors import NumericalError
from ..output.files import SchemaError
from ..types.rydberg import Provenance

TOOLKIT = "rydkerr"

# params that change where or how output appears, not what it contains
_PRESENTATION_PARAMS = {"output_dir", "no_progress", "format"}


def get_version() -> str:
  """Get the package version from metadata, fallback to development version."""
  try:
    return version(TOOLKIT)
  except PackageNotFoundError:
    return "dev"


def command_line(ctx: click.Context) -> str:
  """Canonical `name --param=value ...` string for provenance headers."""
  parts = [ctx.info_name or ""]
  for name, value in sorted(ctx.params.items()):
    if name in _PRESENTATION_PARAMS or value in (None, False, ()):
      continue
    parts.append(f"--{name.replace('_', '-')}={value}")
  return " ".join(parts)


def make_provenance(ctx: click.Context, config: RunConfig) -> Provenance:
  return {
    "toolkit": TOOLKIT,
    "version": get_version(),
    "config_hash": config.digest,
    "command": command_line(ctx),
  }


def load_context_config(
  ctx: click.Context, overrides: Overrides | None = None
) -> RunConfig:
  """Load the run config named by --config, else the default file if present.

  Raises:
      ConfigError: If the config cannot be read or is invalid.
  """
  root = ctx.find_root()
  path = (root.obj or {}).get("config")
  if path is None:
    default = get_run_config_path()
    path = default if default.exists() else None
  return load_run_config(path, overrides)


def resolve_output_dir(config: RunConfig, override: str | None) -> Path:
  return Path(override) if override else config.output_dir


def parse_float_list(text: str, name: str) -> list[float]:
  """Comma-separated floats, e.g. "0, 0.1, 1"."""
  try:
    return [float(item) for item in text.split(",") if item.strip()]
  except ValueError as error:
    raise click.BadParameter(f"expected comma-separated numbers: {error}", param_hint=name)


# Common option groups
output_options = [
  click.option(
    "--output-dir",
    "-o",
    type=click.Path(file_okay=False),
    help="Directory for result files (default: config output_dir or RYDKERR_OUTPUT_DIR)",
  ),
]

run_options = [
  click.option("--seed", type=int, help="Master seed for every random draw"),
  click.option("--no-progress", is_flag=True, help="Disable progress tracking"),
]

# Type variable for function decorators
F = TypeVar("F", bound=Callable[..., Any])


def add_options(options: Sequence[Callable[[F], F]]) -> Callable[[F], F]:
  """Decorator to add multiple options to a command."""

  def decorator(func: F) -> F:
    for option in reversed(options):
      func = option(func)
    return func

  return decorator


@contextmanager
def bad_parameter(param_hint: str) -> Iterator[None]:
  """Report a ValueError raised while applying an option as a usage error."""
  try:
    yield
  except ValueError as error:
    raise click.BadParameter(str(error), param_hint=param_hint) from error


def handle_command_errors(func: F) -> F:
  """Report failures; 2 for config, dataset and usage errors, 1 for numerical ones.

  A ValueError escaping the numerical core counts as a numerical failure;
  option values are checked at the option with `bad_parameter`.
  """

  @functools.wraps(func)
  def wrapper(*args: Any, **kwargs: Any) -> Any:
    try:
      return func(*args, **kwargs)
    except ConfigError as error:
      click.echo(f"❌ {click.style('Config error:', fg='red', bold=True)} {error}", err=True)
      raise click.exceptions.Exit(2) from error
    except SchemaError as error:
      click.echo(f"❌ {click.style('Invalid dataset:', fg='red', bold=True)} {error}", err=True)
      raise click.exceptions.Exit(2) from error
    except (NumericalError, ValueError) as error:
      click.echo(f"❌ {click.style('Numerical failure:', fg='red', bold=True)} {error}", err=True)
      raise click.exceptions.Exit(1) from error

  return wrapper  # type: ignore[return-value]
