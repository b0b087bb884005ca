"""Configuration locations and the TOML run configuration."""

import hashlib
import json
import os
import re
import tempfile
import tomllib
from dataclasses import dataclass, replace
from math import pi
from pathlib import Path
from typing import Any

import numpy as np

from .core.analysis import AnalysisSettings
from .core.atoms import (
  DEFAULT_C6_REF,
  DEFAULT_N_STAR_REF,
  RydbergState,
  Species,
  c6_from_ghz_um6,
  rydberg_state,
)
from .core.eit import MediumParams
from .core.simulate import (
  BeatNoteParams,
  CampaignSpec,
  DutyCycle,
  SweepSpec,
  calibrate_efficiency,
)
from .types.rydberg import C6Mode

RUN_CONFIG_NAME = "rydkerr.toml"
DEFAULT_OUTPUT_DIR_NAME = "rydkerr-out"

MHZ = 2 * pi * 1e6
NW = 1e-9


def get_default_config_dir() -> Path:
  """Get the default configuration directory based on the operating system."""
  if os.name == "nt":  # Windows
    appdata = os.getenv("APPDATA")
    if appdata:
      return Path(appdata) / "rydkerr"
    # Fallback to temp if APPDATA is not available
    return Path(tempfile.gettempdir()) / "rydkerr"
  else:  # Unix-like (Linux, macOS, etc.)
    xdg_config = os.getenv("XDG_CONFIG_HOME")
    if xdg_config:
      return Path(xdg_config) / "rydkerr"
    home = os.path.expanduser("~")
    return Path(home) / ".config" / "rydkerr"


DEFAULT_CONFIG_DIR = get_default_config_dir()


def get_config_dir() -> Path:
  return Path(os.getenv("RYDKERR_CONFIG_DIR", DEFAULT_CONFIG_DIR))


def get_run_config_path() -> Path:
  """Run config read when no --config is given (RYDKERR_CONFIG or <config_dir>/rydkerr.toml)."""
  return Path(os.getenv("RYDKERR_CONFIG", get_config_dir() / RUN_CONFIG_NAME))


def get_output_dir() -> Path:
  return Path(os.getenv("RYDKERR_OUTPUT_DIR", Path.cwd() / DEFAULT_OUTPUT_DIR_NAME))


class ConfigError(ValueError):
  """Run configuration that cannot be parsed or violates an invariant."""

  def __init__(self, message: str, line: int | None = None) -> None:
    if line is not None:
      message = f"line {line}: {message}"
    super().__init__(message)
    self.line = line


# section -> key -> (accepted types, default); None section holds top-level keys
_FLOAT = (float, int)
SCHEMA: dict[str | None, dict[str, tuple[tuple[type, ...], Any]]] = {
  None: {
    "seed": ((int,), None),
    "output_dir": ((str,), None),
  },
  "species": {
    "name": ((str,), "Rb85"),
    "probe_wavelength_nm": (_FLOAT, 780.0),
    "linewidth_mhz": (_FLOAT, 6.066),
    "quantum_defect": (_FLOAT, 2.6),
  },
  "c6": {
    "mode": ((str,), "ns_fit"),
    "ref_ghz_um6": (_FLOAT, None),
    "n_star_ref": (_FLOAT, DEFAULT_N_STAR_REF),
    "min_n": ((int,), 30),
  },
  "medium": {
    "density_cm3": (_FLOAT, 3e10),
    "length_mm": (_FLOAT, 0.5),
    "probe_waist_um": (_FLOAT, 20.0),
    "coupling_rabi_mhz": (_FLOAT, 7.0),
    "gamma_rel_mhz": (_FLOAT, 0.0),
    "coupling_detuning_mhz": (_FLOAT, 0.0),
    "area_convention": ((str,), "full"),
  },
  "spectrum": {
    "span_gamma": (_FLOAT, 4.0),
    "points": ((int,), 801),
    "noise": (_FLOAT, 0.01),
  },
  "duty_cycle": {
    "trap_ms": (_FLOAT, 7.5),
    "measurement_ms": (_FLOAT, 1.2),
    "spectroscopy_us": (_FLOAT, 300.0),
    "pulse_count": ((int,), 375),
    "pulse_width_ns": (_FLOAT, 600.0),
    "pulse_spacing_us": (_FLOAT, 2.4),
    "spacing": ((str,), "period"),
  },
  "beatnote": {
    "sample_rate_ghz": (_FLOAT, 1.0),
    "beat_frequency_mhz": (_FLOAT, 100.0),
    "amplitude": (_FLOAT, 1.0),
    "amplitude_noise": (_FLOAT, 0.02),
    "phase_jitter": (_FLOAT, 0.0),
    "guard_fraction": (_FLOAT, 0.1),
    "drift_rad_per_s": (_FLOAT, 0.0),
    "signal_power_nw": (_FLOAT, 1.0),
    "pulses": ((int,), None),
  },
  "sweep": {
    "levels": ((list,), [49, 54, 58, 62, 65, 68, 70]),
    "power_min_nw": (_FLOAT, 0.01),
    "power_max_nw": (_FLOAT, 100.0),
    "power_points": ((int,), 13),
    "signal_powers_nw": ((list,), None),
    "probe_power_nw": (_FLOAT, 1.0),
    "shots_per_point": ((int,), 375),
    "phase_noise": (_FLOAT, 0.002),
    "od_min": (_FLOAT, 1.0),
    "od_max": (_FLOAT, 2.0),
    "power_drift": (_FLOAT, 0.10),
    "efficiency": (_FLOAT, 1.0),
    "calibrate": ((bool,), True),
    "target_level": ((int,), 68),
    "target_slope_mrad_per_nw": (_FLOAT, 8.0),
    "saturate": ((bool,), False),
    "workers": ((int,), 1),
  },
  "analysis": {
    "linear_max_nw": (_FLOAT, 2.0),
    "inflation": ((str,), "one_sided"),
    "power_law_space": ((str,), "log"),
    "phi_pkpk_rel": (_FLOAT, 0.075),
    "power_drift_rel": (_FLOAT, 0.10),
    "knee_drop": (_FLOAT, 0.2),
  },
}

Overrides = dict[str | None, dict[str, Any]]


def config_hash(text: str, overrides: Overrides | None = None) -> str:
  """First 16 hex digits of SHA-256 over the config text plus applied overrides."""
  canonical = json.dumps(
    {str(k): v for k, v in (overrides or {}).items()}, sort_keys=True, default=str
  )
  return hashlib.sha256(f"{text}\n{canonical}".encode()).hexdigest()[:16]


def _key_line(text: str, section: str | None, key: str | None = None) -> int | None:
  """1-based line of `key` in `section` (or of the section header when key is None)."""
  current: str | None = None
  for number, raw in enumerate(text.splitlines(), 1):
    line = raw.strip()
    header = re.match(r"^\[([^\[\]]+)\]", line)
    if header:
      current = header.group(1).strip()
      if key is None and current == section:
        return number
      continue
    if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*=", line):
      return number
  return None


def _check_type(value: Any, types: tuple[type, ...]) -> bool:
  if isinstance(value, bool) and bool not in types:
    return False
  return isinstance(value, types)


@dataclass(frozen=True)
class RunConfig:
  """Parsed run configuration in SI units."""

  values: dict[str | None, dict[str, Any]]
  text: str
  overrides: Overrides
  path: Path | None
  seed: int | None
  output_dir: Path
  species: Species
  medium: MediumParams
  duty: DutyCycle
  beatnote: BeatNoteParams
  analysis: AnalysisSettings
  c6_mode: C6Mode
  c6_ref: float
  n_star_ref: float
  min_n: int

  @property
  def digest(self) -> str:
    return config_hash(self.text, self.overrides)

  def section(self, name: str | None) -> dict[str, Any]:
    return self.values[name]

  def state(self, n: int) -> RydbergState:
    return rydberg_state(
      n,
      self.species,
      c6_mode=self.c6_mode,
      c6_ref=self.c6_ref,
      n_star_ref=self.n_star_ref,
      min_n=self.min_n,
    )

  def signal_powers(self) -> tuple[float, ...]:
    sweep = self.values["sweep"]
    if sweep["signal_powers_nw"] is not None:
      return tuple(float(p) * NW for p in sweep["signal_powers_nw"])
    return tuple(
      float(p) * NW
      for p in np.geomspace(
        sweep["power_min_nw"], sweep["power_max_nw"], sweep["power_points"]
      )
    )

  def sweep_spec(
    self, seed: int | None = None, saturate: bool | None = None
  ) -> SweepSpec:
    """Sweep for `seed` (or the configured seed), calibrated when configured.

    `saturate` overrides the configured choice of saturated Rydberg density.
    """
    seed = self.seed if seed is None else seed
    if seed is None:
      raise ConfigError("a seed is required: set `seed` in the config or pass --seed")
    sweep = self.values["sweep"]
    try:
      spec = SweepSpec(
        seed=seed,
        levels=tuple(sweep["levels"]),
        signal_powers=self.signal_powers(),
        probe_power=sweep["probe_power_nw"] * NW,
        shots_per_point=sweep["shots_per_point"],
        phase_noise=float(sweep["phase_noise"]),
        od_range=(float(sweep["od_min"]), float(sweep["od_max"])),
        power_drift=float(sweep["power_drift"]),
        efficiency=float(sweep["efficiency"]),
        saturate=sweep["saturate"] if saturate is None else saturate,
        medium=self.medium,
        c6_mode=self.c6_mode,
        c6_ref=self.c6_ref,
        n_star_ref=self.n_star_ref,
        min_n=self.min_n,
      )
      if sweep["calibrate"]:
        spec = calibrate_efficiency(
          spec,
          target_level=sweep["target_level"],
          target_slope=sweep["target_slope_mrad_per_nw"] * 1e-3 / NW,
        )
    except ValueError as error:
      raise ConfigError(f"[sweep] {error}", _key_line(self.text, "sweep")) from error
    return spec

  def campaign_spec(self, seed: int | None = None) -> CampaignSpec:
    spectrum = self.values["spectrum"]
    beatnote = self.values["beatnote"]
    return CampaignSpec(
      sweep=self.sweep_spec(seed),
      duty=self.duty,
      beatnote=self.beatnote,
      beatnote_signal_power=beatnote["signal_power_nw"] * NW,
      beatnote_pulses=beatnote["pulses"],
      spectrum_noise=float(spectrum["noise"]),
      spectrum_points=spectrum["points"],
      spectrum_span=float(spectrum["span_gamma"]),
    )


def _defaults() -> dict[str | None, dict[str, Any]]:
  return {
    section: {key: default for key, (_, default) in keys.items()}
    for section, keys in SCHEMA.items()
  }


def _validate(text: str, data: dict[str, Any]) -> None:
  for name, content in data.items():
    if name in SCHEMA and name is not None and isinstance(content, dict):
      for key, value in content.items():
        if key not in SCHEMA[name]:
          raise ConfigError(f"unknown key '{key}' in [{name}]", _key_line(text, name, key))
        types, _ = SCHEMA[name][key]
        if not _check_type(value, types):
          raise ConfigError(
            f"[{name}] {key} must be {' or '.join(t.__name__ for t in types)}, "
            f"got {type(value).__name__}",
            _key_line(text, name, key),
          )
    elif isinstance(content, dict):
      raise ConfigError(f"unknown section [{name}]", _key_line(text, name))
    elif name not in SCHEMA[None]:
      raise ConfigError(f"unknown top-level key '{name}'", _key_line(text, None, name))
    elif not _check_type(content, SCHEMA[None][name][0]):
      raise ConfigError(
        f"{name} has the wrong type ({type(content).__name__})",
        _key_line(text, None, name),
      )


def load_run_config(
  path: str | Path | None = None, overrides: Overrides | None = None
) -> RunConfig:
  """Parse a run config file (or defaults when `path` is None) and apply overrides.

  Raises:
      ConfigError: On TOML syntax errors, unknown sections or keys, wrong value
        types and values that violate a model invariant; the message carries
        the 1-based line number whenever it can be located.
  """
  overrides = overrides or {}
  text = ""
  if path is not None:
    path = Path(path)
    try:
      text = path.read_text(encoding="utf-8")
    except OSError as error:
      raise ConfigError(f"cannot read config file {path}: {error}") from error
  try:
    data = tomllib.loads(text)
  except tomllib.TOMLDecodeError as error:
    match = re.search(r"line (\d+)", str(error))
    raise ConfigError(
      f"invalid TOML: {error}", int(match.group(1)) if match else None
    ) from error

  _validate(text, data)
  values = _defaults()
  for name, content in data.items():
    if isinstance(content, dict):
      values[name].update(content)
    else:
      values[None][name] = content
  for section, keys in overrides.items():
    for key, value in keys.items():
      if key not in SCHEMA.get(section, {}):
        raise ConfigError(f"unknown override {section}.{key}")
      if value is not None:
        values[section][key] = value

  def fail(section: str, error: Exception) -> ConfigError:
    return ConfigError(f"[{section}] {error}", _key_line(text, section))

  species_cfg = values["species"]
  try:
    species = Species(
      name=species_cfg["name"],
      probe_wavelength=species_cfg["probe_wavelength_nm"] * 1e-9,
      natural_linewidth=species_cfg["linewidth_mhz"] * MHZ,
      quantum_defect=float(species_cfg["quantum_defect"]),
    )
  except ValueError as error:
    raise fail("species", error) from error

  c6_cfg = values["c6"]
  if c6_cfg["mode"] not in ("ns_fit", "power_law"):
    raise ConfigError(
      f"[c6] unknown mode '{c6_cfg['mode']}'", _key_line(text, "c6", "mode")
    )
  c6_ref = (
    DEFAULT_C6_REF
    if c6_cfg["ref_ghz_um6"] is None
    else c6_from_ghz_um6(c6_cfg["ref_ghz_um6"])
  )
  if c6_ref <= 0 or c6_cfg["n_star_ref"] <= 0:
    raise fail("c6", ValueError("C6 reference must be positive"))

  medium_cfg = values["medium"]
  try:
    medium = MediumParams(
      density=medium_cfg["density_cm3"] * 1e6,
      length=medium_cfg["length_mm"] * 1e-3,
      probe_waist=medium_cfg["probe_waist_um"] * 1e-6,
      omega_c=medium_cfg["coupling_rabi_mhz"] * MHZ,
      species=species,
      gamma_rel=medium_cfg["gamma_rel_mhz"] * MHZ,
      delta_c=medium_cfg["coupling_detuning_mhz"] * MHZ,
      area_convention=medium_cfg["area_convention"],
    )
  except ValueError as error:
    raise fail("medium", error) from error

  duty_cfg = values["duty_cycle"]
  try:
    duty = DutyCycle(
      trap_duration=duty_cfg["trap_ms"] * 1e-3,
      measurement_duration=duty_cfg["measurement_ms"] * 1e-3,
      spectroscopy_window=duty_cfg["spectroscopy_us"] * 1e-6,
      pulse_count=duty_cfg["pulse_count"],
      pulse_width=duty_cfg["pulse_width_ns"] * 1e-9,
      pulse_spacing=duty_cfg["pulse_spacing_us"] * 1e-6,
      spacing=duty_cfg["spacing"],
    )
  except ValueError as error:
    raise fail("duty_cycle", error) from error

  beat_cfg = values["beatnote"]
  try:
    beatnote = BeatNoteParams(
      sample_rate=beat_cfg["sample_rate_ghz"] * 1e9,
      beat_frequency=beat_cfg["beat_frequency_mhz"] * 1e6,
      amplitude=float(beat_cfg["amplitude"]),
      amplitude_noise=float(beat_cfg["amplitude_noise"]),
      phase_jitter=float(beat_cfg["phase_jitter"]),
      guard_fraction=float(beat_cfg["guard_fraction"]),
      drift_rate=float(beat_cfg["drift_rad_per_s"]),
    )
  except ValueError as error:
    raise fail("beatnote", error) from error
  pulses = beat_cfg["pulses"]
  if pulses is not None and not 1 <= pulses <= duty.pulse_count:
    raise ConfigError(
      f"[beatnote] pulses must lie in [1, {duty.pulse_count}]",
      _key_line(text, "beatnote", "pulses"),
    )

  analysis_cfg = values["analysis"]
  if analysis_cfg["inflation"] not in ("one_sided", "none"):
    raise ConfigError(
      f"[analysis] unknown inflation rule '{analysis_cfg['inflation']}'",
      _key_line(text, "analysis", "inflation"),
    )
  if analysis_cfg["power_law_space"] not in ("log", "linear"):
    raise ConfigError(
      f"[analysis] unknown power_law_space '{analysis_cfg['power_law_space']}'",
      _key_line(text, "analysis", "power_law_space"),
    )
  for key in ("phi_pkpk_rel", "power_drift_rel", "knee_drop"):
    if analysis_cfg[key] < 0:
      raise ConfigError(
        f"[analysis] {key} must be non-negative", _key_line(text, "analysis", key)
      )
  linear_max = analysis_cfg["linear_max_nw"]
  analysis = AnalysisSettings(
    linear_max=None if linear_max <= 0 else linear_max * NW,
    inflation=analysis_cfg["inflation"],
    space=analysis_cfg["power_law_space"],
    phi_pkpk_rel=float(analysis_cfg["phi_pkpk_rel"]),
    power_drift_rel=float(analysis_cfg["power_drift_rel"]),
    knee_drop=float(analysis_cfg["knee_drop"]),
  )

  sweep_cfg = values["sweep"]
  levels = sweep_cfg["levels"]
  if not levels or not all(
    isinstance(n, int) and not isinstance(n, bool) for n in levels
  ):
    raise ConfigError(
      "[sweep] levels must be a non-empty list of integers",
      _key_line(text, "sweep", "levels"),
    )
  for n in levels:
    if n < c6_cfg["min_n"]:
      raise ConfigError(
        f"[sweep] level {n} is below the validity guard n >= {c6_cfg['min_n']}",
        _key_line(text, "sweep", "levels"),
      )
  if sweep_cfg["workers"] < 1:
    raise ConfigError(
      "[sweep] workers must be at least 1", _key_line(text, "sweep", "workers")
    )

  top = values[None]
  output_dir = Path(top["output_dir"]) if top["output_dir"] else get_output_dir()
  return RunConfig(
    values=values,
    text=text,
    overrides=overrides,
    path=path,
    seed=top["seed"],
    output_dir=output_dir,
    species=species,
    medium=medium,
    duty=duty,
    beatnote=beatnote,
    analysis=analysis,
    c6_mode=c6_cfg["mode"],
    c6_ref=c6_ref,
    n_star_ref=float(c6_cfg["n_star_ref"]),
    min_n=c6_cfg["min_n"],
  )


def with_seed(config: RunConfig, seed: int | None) -> RunConfig:
  """Return `config` with a --seed override recorded for provenance."""
  if seed is None:
    return config
  overrides = {**config.overrides, None: {**config.overrides.get(None, {}), "seed": seed}}
  return replace(config, seed=seed, overrides=overrides)
