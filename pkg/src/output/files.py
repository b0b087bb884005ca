"""Result files: CSV tables, JSON reports and beat-note records with provenance."""

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from ..core.analysis import AnalysisReport, XPhaseMeasurement
from ..core.eit import MediumParams, Spectrum
from ..core.simulate import BeatNoteRecord, TruthRow
from ..types.rydberg import BeatNoteHeader, Provenance

SWEEP_COLUMNS = (
  "level",
  "n_star",
  "signal_power_w",
  "probe_power_w",
  "phase_rad",
  "sem_rad",
  "od",
  "phi_pkpk_rad",
  "validity_ratio",
)
TRUTH_COLUMNS = (
  "level",
  "n_star",
  "signal_power_w",
  "actual_signal_power_w",
  "od",
  "efficiency",
  "true_phase_rad",
)
SPECTRUM_COLUMNS = ("delta_p_hz", "transmission", "phase_rad")

TRUTH_SUFFIX = ".truth.csv"


class SchemaError(ValueError):
  """A dataset file that does not follow its column schema."""


def provenance_line(provenance: Provenance) -> str:
  return (
    f"# {provenance['toolkit']} {provenance['version']} "
    f"config_sha256={provenance['config_hash']} command={provenance['command']}"
  )


def write_csv(
  path: Path,
  columns: Sequence[str],
  rows: Iterable[Sequence[Any]],
  provenance: Provenance,
) -> Path:
  """Write a CSV table preceded by a `#` provenance comment line."""
  path.parent.mkdir(parents=True, exist_ok=True)
  with open(path, "w", encoding="utf-8", newline="") as f:
    f.write(provenance_line(provenance) + "\n")
    writer = csv.writer(f)
    writer.writerow(columns)
    for row in rows:
      writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
  return path


def write_json(path: Path, payload: Any, provenance: Provenance) -> Path:
  path.parent.mkdir(parents=True, exist_ok=True)
  with open(path, "w", encoding="utf-8") as f:
    json.dump({**payload, "provenance": provenance}, f, indent=2, ensure_ascii=False)
  return path


def write_spectrum_csv(path: Path, s: Spectrum, provenance: Provenance) -> Path:
  """Probe detuning in Hz (not angular), transmission and phase."""
  rows = zip(
    (s.detunings / (2 * np.pi)).tolist(),
    s.transmission.tolist(),
    s.phase.tolist(),
  )
  return write_csv(path, SPECTRUM_COLUMNS, rows, provenance)


def write_sweep_csv(
  path: Path, rows: Sequence[XPhaseMeasurement], provenance: Provenance
) -> Path:
  return write_csv(
    path,
    SWEEP_COLUMNS,
    (
      (
        r.level,
        r.n_star,
        r.signal_power,
        r.probe_power,
        r.phase,
        r.sem,
        r.od,
        r.phi_pkpk,
        r.validity_ratio,
      )
      for r in rows
    ),
    provenance,
  )


def truth_path(sweep_path: Path) -> Path:
  return sweep_path.with_name(sweep_path.name.removesuffix(".csv") + TRUTH_SUFFIX)


def write_truth_csv(path: Path, truth: Sequence[TruthRow], provenance: Provenance) -> Path:
  return write_csv(
    path,
    TRUTH_COLUMNS,
    (
      (
        t.level,
        t.n_star,
        t.signal_power,
        t.actual_signal_power,
        t.od,
        t.efficiency,
        t.true_phase,
      )
      for t in truth
    ),
    provenance,
  )


def _data_lines(path: Path) -> list[tuple[int, str]]:
  try:
    with open(path, encoding="utf-8") as f:
      lines = f.read().splitlines()
  except OSError as e:
    raise SchemaError(f"cannot read dataset {path}: {e}") from e
  return [
    (number, line)
    for number, line in enumerate(lines, 1)
    if line.strip() and not line.lstrip().startswith("#")
  ]


def _records(
  path: Path, columns: Sequence[str]
) -> list[tuple[int, int, dict[str, str]]]:
  """(row number, line number, cells by column) for every data row of a table."""
  lines = _data_lines(path)
  if not lines:
    raise SchemaError(f"{path}: no header row")
  _, header_line = lines[0]
  header = [c.strip() for c in next(csv.reader([header_line]))]
  missing = [c for c in columns if c not in header]
  if missing:
    raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
  if len(lines) == 1:
    raise SchemaError(f"{path}: dataset has no rows")

  records = []
  for row_number, (line_number, line) in enumerate(lines[1:], 1):
    cells = next(csv.reader([line]))
    if len(cells) != len(header):
      raise SchemaError(
        f"{path}: row {row_number} (line {line_number}) has {len(cells)} fields, "
        f"expected {len(header)}"
      )
    records.append((row_number, line_number, dict(zip(header, cells))))
  return records


def read_spectrum_csv(path: str | Path, params: MediumParams) -> Spectrum:
  """Read a spectrum table back onto the angular detuning grid.

  `params` supplies what the table does not carry: species, geometry and
  the nominal medium the lineshape is fitted around.
  """
  path = Path(path)
  columns: dict[str, list[float]] = {name: [] for name in SPECTRUM_COLUMNS}
  for row_number, line_number, cells in _records(path, SPECTRUM_COLUMNS):
    try:
      for name in SPECTRUM_COLUMNS:
        columns[name].append(float(cells[name]))
    except ValueError as e:
      raise SchemaError(f"{path}: row {row_number} (line {line_number}): {e}") from e
  try:
    return Spectrum(
      detunings=2 * np.pi * np.array(columns["delta_p_hz"]),
      transmission=np.array(columns["transmission"]),
      phase=np.array(columns["phase_rad"]),
      params=params,
    )
  except ValueError as e:
    raise SchemaError(f"{path}: {e}") from e


def read_sweep_csv(path: str | Path) -> list[XPhaseMeasurement]:
  """Read a sweep table, naming the 1-based data row of any schema violation."""
  path = Path(path)
  points = []
  for row_number, line_number, cells in _records(path, SWEEP_COLUMNS):
    try:
      level = int(cells["level"])
      values = {name: float(cells[name]) for name in SWEEP_COLUMNS if name != "level"}
      points.append(
        XPhaseMeasurement(
          level=level,
          n_star=values["n_star"],
          signal_power=values["signal_power_w"],
          phase=values["phase_rad"],
          sem=values["sem_rad"],
          od=values["od"],
          phi_pkpk=values["phi_pkpk_rad"],
          probe_power=values["probe_power_w"],
          validity_ratio=values["validity_ratio"],
        )
      )
    except ValueError as e:
      raise SchemaError(f"{path}: row {row_number} (line {line_number}): {e}") from e
  return points


def write_beatnote(stem: Path, rec: BeatNoteRecord, provenance: Provenance) -> Path:
  """Samples and ground-truth phase as rows of `<stem>.npy`, header to `<stem>.json`."""
  stem.parent.mkdir(parents=True, exist_ok=True)
  np.save(stem.with_suffix(".npy"), np.stack((rec.samples, rec.true_phase)))
  header: BeatNoteHeader = {**rec.header(), "provenance": provenance}
  with open(stem.with_suffix(".json"), "w", encoding="utf-8") as f:
    json.dump(header, f, indent=2)
  return stem.with_suffix(".json")


def read_beatnote(header_path: str | Path) -> BeatNoteRecord:
  header_path = Path(header_path)
  try:
    with open(header_path, encoding="utf-8") as f:
      header: BeatNoteHeader = json.load(f)
    samples, true_phase = np.load(header_path.with_suffix(".npy"))
  except (OSError, ValueError) as e:
    raise SchemaError(f"cannot read beat-note record {header_path}: {e}") from e
  try:
    return BeatNoteRecord(
      sample_rate=header["sample_rate_hz"],
      beat_frequency=header["beat_frequency_hz"],
      samples=samples,
      markers=np.asarray(header["markers"], dtype=np.int64),
      true_phase=true_phase,
      phase_step=header["phase_step_rad"],
      level=header["level"],
      signal_power=header["signal_power_w"],
    )
  except (KeyError, ValueError) as e:
    raise SchemaError(f"{header_path}: {e}") from e


def write_analysis_curves(
  directory: Path, report: AnalysisReport, provenance: Provenance
) -> list[Path]:
  """Plot-ready tables: per-point data with the level's line, and the power law."""
  fits = {lv.level: lv for lv in report.levels}
  point_rows = []
  for p in sorted(report.points, key=lambda p: (p.level, p.signal_power)):
    fitted = fits[p.level].line_phase(p.signal_power)
    point_rows.append(
      (p.level, p.n_star, p.signal_power, p.phase, p.sem, fitted, p.phase - fitted)
    )
  law_rows = []
  for lv in report.levels:
    fitted = float(report.curve(lv.n_star))
    value = abs(lv.rescaled.value)
    law_rows.append((lv.level, lv.n_star, value, lv.rescaled.error, fitted, value - fitted))
  return [
    write_csv(
      directory / "slopes_curve.csv",
      (
        "level",
        "n_star",
        "signal_power_w",
        "phase_rad",
        "sem_rad",
        "fit_phase_rad",
        "residual_rad",
      ),
      point_rows,
      provenance,
    ),
    write_csv(
      directory / "power_law_curve.csv",
      ("level", "n_star", "rescaled_slope", "rescaled_err", "fit", "residual"),
      law_rows,
      provenance,
    ),
  ]
