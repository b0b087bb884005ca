"""Synthetic experiments: spectroscopy scans, beat-note records and power sweeps.

Every random draw comes from a substream keyed by (stream, level, cell) under
the master seed, so outputs are bit-identical for a given seed whatever the
number of worker threads.
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import floor, isclose, pi, sqrt

import click
import numpy as np
from numpy.typing import ArrayLike, NDArray
from tqdm import tqdm

from ..types.rydberg import BeatNoteHeader, C6Mode, PulseSpacing
from .analysis import XPhaseMeasurement
from .atoms import (
  DEFAULT_C6_REF,
  DEFAULT_MIN_N,
  DEFAULT_N_STAR_REF,
  RydbergState,
  rydberg_state,
)
from .eit import (
  MediumParams,
  Spectrum,
  dephasing_for_contrast,
  experiment_medium,
  feature_grid,
  phi_pkpk,
  spectrum,
)
from .kerr import (
  CrossKerrResult,
  cross_phase_closed,
  cross_phase_full,
  cross_phase_saturated,
  kerr_inputs,
  low_power_slope,
  rydberg_density,
  unblockaded_fraction,
)

FloatArray = NDArray[np.float64]

STREAMS = {"drift": 0, "shots": 1, "spectrum": 2, "beatnote": 3}
NOISELESS_SEM = 1e-12
VALIDITY_FLAG = 0.5

DEFAULT_LEVELS = (49, 54, 58, 62, 65, 68, 70)
DEFAULT_SIGNAL_POWERS = tuple(float(p) for p in np.geomspace(1e-11, 1e-7, 13))


def substream_seed(
  seed: int, stream: str, level: int = 0, cell: int = 0
) -> np.random.SeedSequence:
  """Seed sequence of one (stream, level, cell) under `seed`."""
  if stream not in STREAMS:
    raise ValueError(f"Unknown stream: {stream}")
  return np.random.SeedSequence(seed, spawn_key=(STREAMS[stream], level, cell))


def substream(
  seed: int, stream: str, level: int = 0, cell: int = 0
) -> np.random.Generator:
  return np.random.default_rng(substream_seed(seed, stream, level, cell))


def _warn(message: str) -> None:
  click.echo(f"⚠️  {click.style('Warning:', fg='yellow', bold=True)} {message}", err=True)


@dataclass(frozen=True)
class DutyCycle:
  """Trap/measure timing of one experimental cycle (seconds).

  With spacing "period" the pulse period is `pulse_spacing`; with "gap" the
  spacing is the dark time between pulses and the period is width + spacing.
  """

  trap_duration: float = 7.5e-3
  measurement_duration: float = 1.2e-3
  spectroscopy_window: float = 300e-6
  pulse_count: int = 375
  pulse_width: float = 600e-9
  pulse_spacing: float = 2.4e-6
  spacing: PulseSpacing = "period"

  def __post_init__(self) -> None:
    for name in (
      "trap_duration",
      "measurement_duration",
      "spectroscopy_window",
      "pulse_width",
      "pulse_spacing",
    ):
      if getattr(self, name) <= 0:
        raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
    if self.pulse_count < 1:
      raise ValueError(f"pulse_count must be at least 1, got {self.pulse_count}")
    if self.spacing not in ("period", "gap"):
      raise ValueError(f"Unknown pulse spacing: {self.spacing}")
    if self.gap <= 0:
      raise ValueError("pulse period must exceed the pulse width")
    available = self.measurement_duration - self.spectroscopy_window
    if self.pulse_train > available * (1 + 1e-9):
      raise ValueError(
        f"{self.pulse_count} pulses with period {self.pulse_period * 1e6:g} us need "
        f"{self.pulse_train * 1e6:g} us but only {available * 1e6:g} us remain "
        "after spectroscopy"
      )

  @property
  def pulse_period(self) -> float:
    if self.spacing == "period":
      return self.pulse_spacing
    return self.pulse_width + self.pulse_spacing

  @property
  def gap(self) -> float:
    return self.pulse_period - self.pulse_width

  @property
  def pulse_train(self) -> float:
    return self.pulse_count * self.pulse_period

  @property
  def cycle_duration(self) -> float:
    return self.trap_duration + self.measurement_duration


@dataclass(frozen=True)
class BeatNoteParams:
  sample_rate: float = 1e9  # Hz
  beat_frequency: float = 100e6  # Hz
  amplitude: float = 1.0
  amplitude_noise: float = 0.0
  phase_jitter: float = 0.0  # rad per sample
  guard_fraction: float = 0.1
  drift_rate: float = 0.0  # rad/s

  def __post_init__(self) -> None:
    if self.beat_frequency <= 0 or self.sample_rate < 4 * self.beat_frequency:
      raise ValueError(
        f"sample_rate {self.sample_rate:g} Hz must be at least 4x the beat "
        f"frequency {self.beat_frequency:g} Hz"
      )
    if self.amplitude <= 0:
      raise ValueError(f"amplitude must be positive, got {self.amplitude!r}")
    if self.amplitude_noise < 0 or self.phase_jitter < 0:
      raise ValueError("noise levels must be non-negative")
    if not 0 <= self.guard_fraction < 0.5:
      raise ValueError(f"guard_fraction must lie in [0, 0.5), got {self.guard_fraction!r}")

  @property
  def samples_per_cycle(self) -> float:
    return self.sample_rate / self.beat_frequency


@dataclass(frozen=True)
class BeatNoteRecord:
  """Sampled beat note with (before, during, after) windows for every pulse."""

  sample_rate: float
  beat_frequency: float
  samples: FloatArray
  markers: NDArray[np.int64]  # (pulses, 3, 2) half-open index ranges
  true_phase: FloatArray
  phase_step: float = 0.0
  level: int = 0
  signal_power: float = 0.0

  def __post_init__(self) -> None:
    if self.sample_rate < 4 * self.beat_frequency:
      raise ValueError("sample_rate must be at least 4x the beat frequency")
    if len(self.true_phase) != len(self.samples):
      raise ValueError("true_phase must match samples in length")
    m = self.markers
    if m.ndim != 3 or m.shape[1:] != (3, 2):
      raise ValueError("markers must have shape (pulses, 3, 2)")
    flat = m.reshape(-1, 2)
    if flat.min() < 0 or flat.max() > len(self.samples):
      raise ValueError("markers fall outside the record")
    if np.any(flat[:, 1] <= flat[:, 0]) or np.any(flat[1:, 0] < flat[:-1, 1]):
      raise ValueError("marker windows must be non-empty, ordered and non-overlapping")

  def header(self) -> BeatNoteHeader:
    return {
      "sample_rate_hz": self.sample_rate,
      "beat_frequency_hz": self.beat_frequency,
      "n_samples": len(self.samples),
      "level": self.level,
      "signal_power_w": self.signal_power,
      "phase_step_rad": self.phase_step,
      "markers": self.markers.tolist(),
    }


def synth_spectrum(
  m: MediumParams,
  grid: ArrayLike,
  noise_sd: float,
  seed: int | np.random.SeedSequence,
) -> Spectrum:
  """Model spectrum with additive Gaussian noise on T and phi (T kept in [0, 1])."""
  if noise_sd < 0:
    raise ValueError(f"noise_sd must be non-negative, got {noise_sd!r}")
  clean = spectrum(m, grid)
  if noise_sd == 0:
    return clean
  rng = np.random.default_rng(seed)
  n = len(clean.detunings)
  return replace(
    clean,
    transmission=np.clip(clean.transmission + rng.normal(0.0, noise_sd, n), 0.0, 1.0),
    phase=clean.phase + rng.normal(0.0, noise_sd, n),
  )


def _trim(lo: int, hi: int, guard: float, cycle: float) -> tuple[int, int]:
  """Drop guard bands at both edges, then keep a centred whole number of cycles."""
  g = int(guard * (hi - lo))
  lo, hi = lo + g, hi - g
  length = hi - lo
  if cycle.is_integer():
    keep = (length // int(cycle)) * int(cycle)
  else:
    keep = int(floor(floor(length / cycle) * cycle))
  if keep < 1:
    raise ValueError("window shorter than one beat cycle after guard bands")
  lo += (length - keep) // 2
  return lo, lo + keep


def synth_beatnote(
  phase_step: float,
  duty: DutyCycle,
  params: BeatNoteParams,
  seed: int | np.random.SeedSequence,
  pulses: int | None = None,
  level: int = 0,
  signal_power: float = 0.0,
) -> BeatNoteRecord:
  """Beat note over the pulse train whose phase jumps by `phase_step` in each pulse.

  Each dark gap is split between the previous pulse's "after" window and the
  next pulse's "before" window.
  """
  pulses = duty.pulse_count if pulses is None else pulses
  if not 1 <= pulses <= duty.pulse_count:
    raise ValueError(
      f"requested {pulses} pulses but the duty cycle holds {duty.pulse_count}"
    )
  fs = params.sample_rate
  period_n = round(duty.pulse_period * fs)
  width_n = round(duty.pulse_width * fs)
  gap_n = period_n - width_n
  lead = gap_n // 2
  if width_n < 1 or lead < 1:
    raise ValueError("pulse windows shorter than one sample at this sample rate")
  n_total = pulses * period_n

  idx = np.arange(n_total)
  t = idx / fs
  in_pulse = ((idx - lead) % period_n < width_n) & (idx >= lead)
  true_phase = phase_step * in_pulse + params.drift_rate * t

  rng = np.random.default_rng(seed)
  phase = true_phase
  if params.phase_jitter > 0:
    phase = phase + rng.normal(0.0, params.phase_jitter, n_total)
  carrier = 2 * pi * np.mod(idx * (params.beat_frequency / fs), 1.0)
  samples = params.amplitude * np.cos(carrier + phase)
  if params.amplitude_noise > 0:
    samples = samples + rng.normal(0.0, params.amplitude_noise, n_total)

  cycle = params.samples_per_cycle
  guard = params.guard_fraction
  markers = np.empty((pulses, 3, 2), dtype=np.int64)
  for i in range(pulses):
    start = lead + i * period_n
    stop = start + width_n
    markers[i, 0] = _trim(start - lead, start, guard, cycle)
    markers[i, 1] = _trim(start, stop, guard, cycle)
    markers[i, 2] = _trim(stop, stop + gap_n - lead, guard, cycle)

  return BeatNoteRecord(
    sample_rate=fs,
    beat_frequency=params.beat_frequency,
    samples=samples,
    markers=markers,
    true_phase=true_phase,
    phase_step=phase_step,
    level=level,
    signal_power=signal_power,
  )


@dataclass(frozen=True)
class SweepSpec:
  """A signal-power sweep over Rydberg levels.

  `efficiency` multiplies the modelled phase; see `calibrate_efficiency`.
  """

  seed: int
  levels: tuple[int, ...] = DEFAULT_LEVELS
  signal_powers: tuple[float, ...] = DEFAULT_SIGNAL_POWERS  # W
  probe_power: float = 1e-9  # W
  shots_per_point: int = 375
  phase_noise: float = 0.0  # rad per shot
  od_range: tuple[float, float] = (1.0, 2.0)
  power_drift: float = 0.10
  efficiency: float = 1.0
  saturate: bool = False
  medium: MediumParams = field(default_factory=experiment_medium)
  c6_mode: C6Mode = "ns_fit"
  c6_ref: float = DEFAULT_C6_REF
  n_star_ref: float = DEFAULT_N_STAR_REF
  min_n: int = DEFAULT_MIN_N

  def __post_init__(self) -> None:
    if not isinstance(self.seed, int) or self.seed < 0:
      raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
    if not self.levels:
      raise ValueError("at least one Rydberg level is required")
    if len(set(self.levels)) != len(self.levels):
      raise ValueError("Rydberg levels must be distinct")
    powers = np.asarray(self.signal_powers, dtype=float)
    if len(powers) == 0 or np.any(powers <= 0) or np.any(np.diff(powers) <= 0):
      raise ValueError("signal powers must be positive and strictly increasing")
    if self.probe_power < 0:
      raise ValueError(f"probe_power must be non-negative, got {self.probe_power!r}")
    if self.shots_per_point < 1:
      raise ValueError("shots_per_point must be at least 1")
    if self.phase_noise < 0:
      raise ValueError("phase_noise must be non-negative")
    lo, hi = self.od_range
    if not 0 < lo <= hi:
      raise ValueError(f"od_range must satisfy 0 < min <= max, got {self.od_range!r}")
    if not 0 <= self.power_drift < 1:
      raise ValueError(f"power_drift must lie in [0, 1), got {self.power_drift!r}")
    if self.efficiency == 0:
      raise ValueError("efficiency must be non-zero")

  def state(self, level: int) -> RydbergState:
    return rydberg_state(
      level,
      self.medium.species,
      c6_mode=self.c6_mode,
      c6_ref=self.c6_ref,
      n_star_ref=self.n_star_ref,
      min_n=self.min_n,
    )


@dataclass(frozen=True)
class LevelConditions:
  """Slow drifts for one level's run: measured OD and the signal-power miscalibration.

  With saturation on, `gamma_rel` includes the dephasing that lowers phi_pkpk
  by the probe's unblockaded fraction.
  """

  level: int
  od: float
  power_factor: float
  phi_pkpk: float
  gamma_rel: float = 0.0

  def medium(self, spec: "SweepSpec") -> MediumParams:
    return replace(spec.medium.with_od(self.od), gamma_rel=self.gamma_rel)


@dataclass(frozen=True)
class TruthRow:
  level: int
  n_star: float
  signal_power: float  # nominal, as reported
  actual_signal_power: float
  od: float
  efficiency: float
  true_phase: float


@dataclass(frozen=True)
class SweepResult:
  rows: list[XPhaseMeasurement]
  truth: list[TruthRow]
  conditions: dict[int, LevelConditions]
  flags: tuple[str, ...] = ()


def level_conditions(spec: SweepSpec, level: int) -> LevelConditions:
  rng = substream(spec.seed, "drift", level)
  lo, hi = spec.od_range
  od = float(rng.uniform(lo, hi))
  factor = 1.0 + spec.power_drift * float(rng.uniform(-1.0, 1.0))
  medium = spec.medium.with_od(od)
  if spec.saturate and spec.probe_power > 0:
    k = kerr_inputs(medium, spec.state(level), 0.0, spec.probe_power)
    medium = replace(
      medium, gamma_rel=dephasing_for_contrast(medium, unblockaded_fraction(k))
    )
  return LevelConditions(
    level=level,
    od=od,
    power_factor=factor,
    phi_pkpk=phi_pkpk(spectrum(medium, feature_grid(medium))),
    gamma_rel=medium.gamma_rel,
  )


def model_phase(
  spec: SweepSpec, state: RydbergState, od: float, signal_power: float
) -> CrossKerrResult:
  """Unscaled model cross-phase at one operating point."""
  k = kerr_inputs(spec.medium.with_od(od), state, signal_power, spec.probe_power)
  if spec.saturate:
    return cross_phase_saturated(k, warn=False)
  return cross_phase_full(k, warn=False)


def _sweep_cell(
  spec: SweepSpec,
  state: RydbergState,
  conditions: LevelConditions,
  cell: int,
  nominal: float,
) -> tuple[XPhaseMeasurement, TruthRow]:
  actual = nominal * conditions.power_factor
  result = model_phase(spec, state, conditions.od, actual)
  truth = spec.efficiency * result.phase

  if spec.phase_noise > 0:
    rng = substream(spec.seed, "shots", state.n, cell)
    shots = rng.normal(0.0, spec.phase_noise, spec.shots_per_point)
    measured = truth + float(shots.mean())
    sem = spec.phase_noise / sqrt(spec.shots_per_point)
  else:
    measured, sem = truth, NOISELESS_SEM

  row = XPhaseMeasurement(
    level=state.n,
    n_star=state.n_star,
    signal_power=nominal,
    phase=measured,
    sem=sem,
    od=conditions.od,
    phi_pkpk=conditions.phi_pkpk,
    probe_power=spec.probe_power,
    validity_ratio=result.validity_ratio,
  )
  truth_row = TruthRow(
    level=state.n,
    n_star=state.n_star,
    signal_power=nominal,
    actual_signal_power=actual,
    od=conditions.od,
    efficiency=spec.efficiency,
    true_phase=truth,
  )
  return row, truth_row


def synth_sweep(
  spec: SweepSpec,
  workers: int = 1,
  show_progress: bool = False,
  warn: bool = True,
) -> SweepResult:
  """Noisy, drifting cross-phase table for every (level, signal power) cell."""
  states = {level: spec.state(level) for level in spec.levels}
  conditions = {level: level_conditions(spec, level) for level in spec.levels}
  cells = [
    (level, cell, power)
    for level in spec.levels
    for cell, power in enumerate(spec.signal_powers)
  ]

  def run(job: tuple[int, int, float]) -> tuple[XPhaseMeasurement, TruthRow]:
    level, cell, power = job
    return _sweep_cell(spec, states[level], conditions[level], cell, power)

  with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
    results = list(
      tqdm(
        pool.map(run, cells),
        total=len(cells),
        desc="Sweep",
        unit="cell",
        disable=not show_progress,
      )
    )

  rows = [r for r, _ in results]
  truth = [t for _, t in results]
  flags: tuple[str, ...] = ()
  invalid = [r for r in rows if r.validity_ratio > VALIDITY_FLAG]
  if invalid:
    flags = ("validity",)
    if warn:
      _warn(
        f"{len(invalid)} sweep point(s) have rho_ryd * V_b above {VALIDITY_FLAG}; "
        "the low-density model is outside its range there"
      )
  return SweepResult(rows=rows, truth=truth, conditions=conditions, flags=flags)


def calibrate_efficiency(
  spec: SweepSpec, target_level: int = 68, target_slope: float = 8e6
) -> SweepSpec:
  """Scale the model so `target_level` has low-power slope |target_slope| (rad/W).

  The slope is taken at the middle of the OD drift range.
  """
  if target_slope == 0:
    raise ValueError("target_slope must be non-zero")
  od = sum(spec.od_range) / 2.0
  medium = spec.medium.with_od(od)
  k = kerr_inputs(medium, spec.state(target_level), 0.0, spec.probe_power)
  model = low_power_slope(k, saturate=spec.saturate)
  return replace(spec, efficiency=abs(target_slope) / abs(model))


@dataclass(frozen=True)
class CampaignSpec:
  sweep: SweepSpec
  duty: DutyCycle = field(default_factory=DutyCycle)
  beatnote: BeatNoteParams = field(default_factory=BeatNoteParams)
  beatnote_signal_power: float = 1e-9  # W
  beatnote_pulses: int | None = None
  spectrum_noise: float = 0.01
  spectrum_points: int = 801
  spectrum_span: float = 4.0  # in Gamma


@dataclass(frozen=True)
class Campaign:
  spectra: dict[int, Spectrum]
  beatnotes: dict[int, BeatNoteRecord]
  sweep: SweepResult


def run_campaign(
  campaign: CampaignSpec,
  workers: int = 1,
  show_progress: bool = False,
  warn: bool = True,
) -> Campaign:
  """Spectroscopy scan and beat-note record per level, plus the full power sweep."""
  spec = campaign.sweep
  sweep = synth_sweep(spec, workers=workers, show_progress=show_progress, warn=warn)
  spectra: dict[int, Spectrum] = {}
  beatnotes: dict[int, BeatNoteRecord] = {}
  for level in tqdm(spec.levels, desc="Levels", disable=not show_progress):
    conditions = sweep.conditions[level]
    medium = conditions.medium(spec)
    gamma = medium.gamma
    span = max(campaign.spectrum_span, 1.5 * medium.omega_c / gamma)
    grid = np.linspace(-span * gamma, span * gamma, campaign.spectrum_points)
    spectra[level] = synth_spectrum(
      medium,
      grid,
      campaign.spectrum_noise,
      substream_seed(spec.seed, "spectrum", level),
    )

    actual = campaign.beatnote_signal_power * conditions.power_factor
    result = model_phase(spec, spec.state(level), conditions.od, actual)
    step = spec.efficiency * result.phase
    beatnotes[level] = synth_beatnote(
      step,
      campaign.duty,
      campaign.beatnote,
      substream_seed(spec.seed, "beatnote", level),
      pulses=campaign.beatnote_pulses,
      level=level,
      signal_power=campaign.beatnote_signal_power,
    )
  return Campaign(spectra=spectra, beatnotes=beatnotes, sweep=sweep)


def generating_exponent(spec: SweepSpec) -> float:
  """Log-log slope over the sweep's levels of the small-signal cross-phase slope.

  Rescaled by phi_pkpk, noiseless sweep slopes follow this exponent whether or
  not saturation is on; it is 5.5 exactly for power-law C6.
  """
  if len(spec.levels) < 2:
    raise ValueError("a generating exponent needs at least two levels")
  n_star, slopes = [], []
  for level in spec.levels:
    state = spec.state(level)
    n_star.append(state.n_star)
    slopes.append(abs(low_power_slope(kerr_inputs(spec.medium, state))))
  return float(np.polyfit(np.log(n_star), np.log(slopes), 1)[0])


def sweep_truth_matches(
  spec: SweepSpec, truth: Sequence[TruthRow], rel: float = 1e-9
) -> bool:
  """Check every truth row against an independent route to the same phase.

  Unsaturated rows are compared with the closed form in r_b and rho_ryd;
  saturated rows with the full law divided by 1 + rho x V_b.
  """
  for t in truth:
    k = kerr_inputs(
      spec.medium.with_od(t.od),
      spec.state(t.level),
      t.actual_signal_power,
      spec.probe_power,
    )
    m = k.medium
    if spec.saturate:
      drive = m.density * (m.omega_s**2 + m.omega_p**2) / m.omega_c**2
      phase = cross_phase_full(k, warn=False).phase / (1.0 + drive * k.blockade_volume)
    else:
      phase = cross_phase_closed(
        m.od, k.r_b, rydberg_density(m.density, m.omega_s, m.omega_c)
      )
    if not isclose(t.true_phase, spec.efficiency * phase, rel_tol=rel, abs_tol=0.0):
      return False
  return True
