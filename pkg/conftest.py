"""Shared fixtures."""

import csv
from collections.abc import Callable
from pathlib import Path

import pytest

from src.core.atoms import RydbergState, rydberg_state
from src.core.eit import MediumParams, experiment_medium

SMALL_CAMPAIGN = """\
seed = 11

[sweep]
levels = [58, 65, 68]
power_min_nw = 0.1
power_max_nw = 2.0
power_points = 4

[beatnote]
pulses = 4
"""


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
  """Keep every test away from the user's config and result directories."""
  monkeypatch.setenv("RYDKERR_CONFIG_DIR", str(tmp_path / "config"))
  monkeypatch.setenv("RYDKERR_OUTPUT_DIR", str(tmp_path / "out"))
  monkeypatch.delenv("RYDKERR_CONFIG", raising=False)
  return tmp_path


@pytest.fixture
def medium() -> MediumParams:
  return experiment_medium()


@pytest.fixture
def state68() -> RydbergState:
  return rydberg_state(68)


@pytest.fixture
def small_config(tmp_path: Path) -> Path:
  path = tmp_path / "small.toml"
  path.write_text(SMALL_CAMPAIGN, encoding="utf-8")
  return path


@pytest.fixture
def read_table() -> Callable[[Path], list[dict[str, str]]]:
  """CSV rows as dicts, skipping `#` provenance lines."""

  def read(path: Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as f:
      lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))

  return read
