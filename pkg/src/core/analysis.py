"""Measurement analysis chain.

Spectroscopy fits, per-pulse beat-note phase extraction, per-level slope fits,
optical-depth rescaling, the power-law fit over Rydberg levels and the
reduced chi-square error inflation.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from itertools import groupby
from math import isfinite, log, sqrt
from typing import TYPE_CHECKING

import click
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import curve_fit, least_squares
from scipy.signal import get_window

from ..types.rydberg import (
  AnalysisReportJson,
  BeatNotePhaseJson,
  FitResultJson,
  InflationRule,
  LevelSlopeJson,
  OdSource,
  PowerLawSpace,
)
from .eit import MediumParams, Spectrum, feature_grid, phi_pkpk, spectrum
from .errors import NumericalError

if TYPE_CHECKING:
  from .simulate import BeatNoteRecord

FloatArray = NDArray[np.float64]

DEFAULT_LINEAR_MAX = 2e-9  # W
DEFAULT_KNEE_DROP = 0.2
DRIFT_THRESHOLD = 5.0
SPECTRUM_MAX_NFEV = 500
UNRESOLVED_OMEGA_C = 0.1  # in units of Gamma


def _warn(message: str) -> None:
  click.echo(f"⚠️  {click.style('Warning:', fg='yellow', bold=True)} {message}", err=True)


@dataclass(frozen=True)
class XPhaseMeasurement:
  """One (level, signal power) cross-phase point."""

  level: int
  n_star: float
  signal_power: float  # W
  phase: float  # rad
  sem: float  # rad
  od: float
  phi_pkpk: float  # rad
  probe_power: float = 0.0
  validity_ratio: float = 0.0

  def __post_init__(self) -> None:
    if not self.sem > 0:
      raise ValueError(f"sem must be positive, got {self.sem!r}")
    if not self.signal_power > 0:
      raise ValueError(f"signal_power must be positive, got {self.signal_power!r}")


@dataclass(frozen=True)
class FitResult:
  """Best-fit parameters with their covariance.

  `covariance` is never scaled by error inflation; `std_errors` are
  sqrt(diag(covariance)) times `inflation_applied`.
  """

  names: tuple[str, ...]
  values: FloatArray
  std_errors: FloatArray
  covariance: FloatArray
  chi2_reduced: float
  dof: int
  inflation_applied: float = 1.0
  flags: tuple[str, ...] = ()

  def __post_init__(self) -> None:
    k = len(self.names)
    if self.values.shape != (k,) or self.std_errors.shape != (k,):
      raise ValueError("values and std_errors must match names")
    if self.covariance.shape != (k, k):
      raise ValueError("covariance must be square in the number of parameters")
    if not np.allclose(self.covariance, self.covariance.T, rtol=1e-9, atol=0.0):
      raise ValueError("covariance must be symmetric")
    if self.inflation_applied < 1.0:
      raise ValueError("inflation_applied must be at least 1")

  def __getitem__(self, name: str) -> float:
    return float(self.values[self.names.index(name)])

  def error(self, name: str) -> float:
    return float(self.std_errors[self.names.index(name)])

  def as_json(self) -> FitResultJson:
    return {
      "names": list(self.names),
      "params": {n: float(v) for n, v in zip(self.names, self.values)},
      "std_errors": {n: float(e) for n, e in zip(self.names, self.std_errors)},
      "covariance": self.covariance.tolist(),
      "chi2_reduced": self.chi2_reduced,
      "dof": self.dof,
      "inflation_applied": self.inflation_applied,
      "flags": list(self.flags),
    }


def _fit_result(
  names: tuple[str, ...],
  values: FloatArray,
  covariance: FloatArray,
  chi2: float,
  dof: int,
  flags: tuple[str, ...] = (),
) -> FitResult:
  covariance = (covariance + covariance.T) / 2.0
  return FitResult(
    names=names,
    values=np.asarray(values, dtype=float),
    std_errors=np.sqrt(np.clip(np.diag(covariance), 0.0, None)),
    covariance=covariance,
    chi2_reduced=chi2 / dof if dof > 0 else float("nan"),
    dof=dof,
    flags=flags,
  )


# Spectroscopy


def _initial_guess(s: Spectrum) -> FloatArray:
  d, t = s.detunings, s.transmission
  gamma = s.params.gamma
  od0 = max(-log(max(float(t.min()), 1e-6)), 0.1)
  lower, upper = d <= 0, d >= 0
  dip_minus = d[lower][np.argmin(t[lower])]
  dip_plus = d[upper][np.argmin(t[upper])]
  omega_c0 = max(float(dip_plus - dip_minus), 0.05 * gamma)
  return np.array([od0, omega_c0 / gamma, 0.02])


def fit_spectrum(
  s: Spectrum,
  noise_sd: float | None = None,
  initial: ArrayLike | None = None,
  warn: bool = True,
) -> FitResult:
  """Joint weighted least squares of the EIT lineshape on transmission and phase.

  Fits OD, Omega_c and gamma_rel (rad/s); phi_pkpk is then evaluated on the
  fitted curve and its error propagated from the parameter covariance.

  Args:
      s: Measured spectrum; `s.params` supplies species, geometry and Delta_c.
      noise_sd: Per-point noise on T and phi. When omitted the covariance is
        scaled by the reduced chi-square.
      initial: Starting (OD, Omega_c, gamma_rel); estimated from the data if None.
      warn: Echo a warning when Omega_c is not resolved.
  """
  base = s.params
  gamma = base.gamma
  sigma = noise_sd if noise_sd else 1.0

  def model(x: FloatArray) -> MediumParams:
    return replace(
      base.with_od(max(x[0], 1e-12)), omega_c=x[1] * gamma, gamma_rel=x[2] * gamma
    )

  def residuals(x: FloatArray) -> FloatArray:
    fitted = spectrum(model(x), s.detunings)
    return np.concatenate(
      ((fitted.transmission - s.transmission) / sigma, (fitted.phase - s.phase) / sigma)
    )

  if initial is None:
    x0 = _initial_guess(s)
  else:
    od, omega_c, gamma_rel = np.asarray(initial, dtype=float)
    x0 = np.array([od, omega_c / gamma, gamma_rel / gamma])

  result = least_squares(
    residuals,
    x0,
    bounds=(np.zeros(3), np.full(3, np.inf)),
    xtol=1e-12,
    ftol=1e-12,
    gtol=1e-12,
    max_nfev=SPECTRUM_MAX_NFEV,
    x_scale="jac",
  )
  residual_norm = float(np.linalg.norm(result.fun))
  if not result.success:
    raise NumericalError(f"spectrum fit did not converge: {result.message}", residual_norm)

  dof = 2 * len(s.detunings) - 3
  chi2 = residual_norm**2
  jac = result.jac
  cov_scaled = np.linalg.pinv(jac.T @ jac)
  if not noise_sd:
    cov_scaled *= chi2 / dof
  scale = np.diag([1.0, gamma, gamma])
  covariance = scale @ cov_scaled @ scale
  values = result.x * np.array([1.0, gamma, gamma])

  def pkpk(v: FloatArray) -> float:
    m = replace(base.with_od(max(v[0], 1e-12)), omega_c=v[1], gamma_rel=v[2])
    grid = np.union1d(feature_grid(m), np.linspace(-v[1], v[1], 201))
    return phi_pkpk(spectrum(m, grid))

  grad = np.zeros(3)
  for i in range(3):
    step = 1e-6 * max(abs(values[i]), gamma * 1e-3 if i else 1e-3)
    up, down = values.copy(), values.copy()
    up[i] += step
    down[i] = max(down[i] - step, 0.0)
    grad[i] = (pkpk(up) - pkpk(down)) / (up[i] - down[i])

  full_cov = np.zeros((4, 4))
  full_cov[:3, :3] = covariance
  full_cov[3, :3] = full_cov[:3, 3] = covariance @ grad
  full_cov[3, 3] = float(grad @ covariance @ grad)

  flags: tuple[str, ...] = ()
  omega_c, omega_c_err = values[1], sqrt(max(covariance[1, 1], 0.0))
  if omega_c < UNRESOLVED_OMEGA_C * gamma or omega_c_err > omega_c / 2:
    flags = ("omega_c_unresolved",)
    if warn:
      _warn("coupling Rabi frequency not resolved by the spectrum; gamma_rel is unconstrained")

  return _fit_result(
    ("od", "omega_c", "gamma_rel", "phi_pkpk"),
    np.append(values, pkpk(values)),
    full_cov,
    chi2,
    dof,
    flags,
  )


# Beat-note phase


@dataclass(frozen=True)
class PulsePhaseResult:
  """Per-pulse window phases and the pooled cross-phase."""

  before: FloatArray
  during: FloatArray
  after: FloatArray
  delta: FloatArray
  mean: float
  sem: float
  flags: tuple[str, ...] = ()

  @property
  def n_pulses(self) -> int:
    return len(self.delta)


def window_phase(samples: FloatArray, start: int, stop: int, carrier: FloatArray) -> float:
  """Phase of the beat note in [start, stop) by Hann-weighted IQ demodulation."""
  taper = get_window("hann", stop - start)
  iq = np.sum(taper * samples[start:stop] * np.exp(-1j * carrier[start:stop]))
  return float(np.angle(iq))


def pulse_phases(
  samples: ArrayLike,
  sample_rate: float,
  beat_frequency: float,
  markers: ArrayLike,
  warn: bool = True,
) -> PulsePhaseResult:
  """Demodulate each marked window and form before/during/after phase differences.

  delta = phi_during - (phi_before + phi_after) / 2 per pulse, which cancels
  any phase drift linear in time when the outer windows sit symmetrically
  around the pulse.
  """
  samples = np.asarray(samples, dtype=float)
  marks = np.asarray(markers, dtype=np.int64)
  if marks.ndim != 3 or marks.shape[1:] != (3, 2) or len(marks) == 0:
    raise ValueError("markers must have shape (pulses, 3, 2)")
  if marks.min() < 0 or marks.max() > len(samples):
    raise ValueError("markers fall outside the record")
  if np.any(marks[:, :, 1] <= marks[:, :, 0]):
    raise ValueError("every window must contain at least one sample")

  idx = np.arange(len(samples))
  carrier = 2 * np.pi * np.mod(idx * (beat_frequency / sample_rate), 1.0)
  phases = np.array(
    [[window_phase(samples, lo, hi, carrier) for lo, hi in pulse] for pulse in marks]
  )
  before, during, after = phases[:, 0], phases[:, 1], phases[:, 2]
  # differences via wrapped angles keep pulses straddling +-pi consistent
  rel_during = np.angle(np.exp(1j * (during - before)))
  rel_after = np.angle(np.exp(1j * (after - before)))
  delta = rel_during - rel_after / 2.0

  n = len(delta)
  mean = float(delta.mean())
  sem = float(delta.std(ddof=1) / sqrt(n)) if n > 1 else float("nan")

  flags: tuple[str, ...] = ()
  noise = float(delta.std(ddof=1)) if n > 1 else 0.0
  drifting = np.abs(rel_after) > DRIFT_THRESHOLD * max(noise, 1e-9)
  if drifting.any():
    flags = ("drift",)
    if warn:
      _warn(
        f"{int(drifting.sum())} of {n} pulses show before/after phase differences "
        f"above {DRIFT_THRESHOLD:g}x the noise; drift may contaminate the result"
      )
  return PulsePhaseResult(
    before=before,
    during=during,
    after=after,
    delta=delta,
    mean=mean,
    sem=sem,
    flags=flags,
  )


def extract_pulse_phase(rec: "BeatNoteRecord", warn: bool = True) -> PulsePhaseResult:
  """Pooled cross-phase of a beat-note record over all of its marked pulses."""
  return pulse_phases(
    rec.samples, rec.sample_rate, rec.beat_frequency, rec.markers, warn=warn
  )


# Slopes


def normalize_by_od(points: Sequence[XPhaseMeasurement]) -> list[XPhaseMeasurement]:
  """Divide each point's phase and SEM by its measured optical depth."""
  out = []
  for p in points:
    if p.od <= 0:
      raise ValueError(f"od must be positive, got {p.od!r} at level {p.level}")
    out.append(replace(p, phase=p.phase / p.od, sem=p.sem / p.od))
  return out


def _weighted_line(
  x: FloatArray, y: FloatArray, sigma: FloatArray
) -> tuple[FloatArray, FloatArray, float]:
  scale = float(np.max(np.abs(x)))
  u = x / scale
  w = 1.0 / sigma**2
  s, sx, sy = w.sum(), (w * u).sum(), (w * y).sum()
  sxx, sxy = (w * u * u).sum(), (w * u * y).sum()
  det = s * sxx - sx**2
  if not det > 0:
    raise NumericalError("degenerate abscissae in weighted line fit")
  slope = (s * sxy - sx * sy) / det
  intercept = (sxx * sy - sx * sxy) / det
  cov = np.array([[s, -sx], [-sx, sxx]]) / det
  chi2 = float((w * (y - intercept - slope * u) ** 2).sum())
  unscale = np.diag([1.0 / scale, 1.0])
  return np.array([slope / scale, intercept]), unscale @ cov @ unscale, chi2


def fit_linear_slope(
  points: Sequence[XPhaseMeasurement],
  linear_max: float | None = DEFAULT_LINEAR_MAX,
  warn: bool = True,
) -> FitResult:
  """SEM-weighted straight line of phase against signal power (slope in rad/W).

  Points above `linear_max` are excluded from the fit and flagged.
  """
  used = [p for p in points if linear_max is None or p.signal_power <= linear_max]
  flags: tuple[str, ...] = ()
  excluded = len(points) - len(used)
  if excluded:
    flags = ("excluded_saturating",)
    if warn:
      _warn(
        f"{excluded} point(s) above the {linear_max * 1e9:g} nW linear range "
        "excluded from the slope fit"
      )
  if len(used) < 3:
    raise ValueError(f"need at least 3 points for a slope fit, got {len(used)}")
  x = np.array([p.signal_power for p in used])
  y = np.array([p.phase for p in used])
  sigma = np.array([p.sem for p in used])
  values, cov, chi2 = _weighted_line(x, y, sigma)
  return _fit_result(("slope", "intercept"), values, cov, chi2, len(used) - 2, flags)


def detect_saturation_knee(
  points: Sequence[XPhaseMeasurement], drop: float = DEFAULT_KNEE_DROP, warn: bool = True
) -> float | None:
  """First signal power where the local slope falls `drop` below the low-power slope.

  Only reports the knee; nothing is removed from the data.
  """
  ordered = sorted(points, key=lambda p: p.signal_power)
  if len(ordered) < 4:
    return None
  low = fit_linear_slope(ordered[:3], linear_max=None, warn=False)["slope"]
  if low == 0:
    return None
  for a, b in zip(ordered[2:], ordered[3:]):
    local = (b.phase - a.phase) / (b.signal_power - a.signal_power)
    if abs(local) < (1.0 - drop) * abs(low):
      if warn:
        _warn(
          f"level {a.level}: local slope drops {drop:.0%} below the low-power slope "
          f"by {b.signal_power * 1e9:.3g} nW"
        )
      return b.signal_power
  return None


@dataclass(frozen=True)
class RescaledSlope:
  value: float
  error: float
  statistical_rel: float
  phi_pkpk_rel: float
  power_drift_rel: float

  @property
  def relative_error(self) -> float:
    return self.error / abs(self.value) if self.value else float("inf")


def rescale_slope(
  slope: FitResult,
  od: float,
  phi_pkpk: float,
  phi_pkpk_rel: float = 0.10,
  power_drift_rel: float = 0.0,
  od_normalized: bool = False,
) -> RescaledSlope:
  """Divide by OD, then rescale by OD/phi_pkpk; net slope / phi_pkpk.

  Pass `od_normalized=True` for slopes fitted to phases already divided by OD.
  Relative errors of the slope, phi_pkpk and the signal-power calibration add
  in quadrature.
  """
  if od <= 0 or phi_pkpk <= 0:
    raise ValueError(
      f"od and phi_pkpk must be positive, got od={od!r}, phi_pkpk={phi_pkpk!r}"
    )
  if phi_pkpk_rel < 0 or power_drift_rel < 0:
    raise ValueError("relative uncertainties must be non-negative")
  s, s_err = slope["slope"], slope.error("slope")
  per_od = s if od_normalized else s / od
  value = per_od * od / phi_pkpk
  stat = s_err / abs(s) if s else 0.0
  rel = sqrt(stat**2 + phi_pkpk_rel**2 + power_drift_rel**2)
  return RescaledSlope(
    value=value,
    error=abs(value) * rel,
    statistical_rel=stat,
    phi_pkpk_rel=phi_pkpk_rel,
    power_drift_rel=power_drift_rel,
  )


# Power law


def fit_power_law(
  x: ArrayLike, y: ArrayLike, sigma_y: ArrayLike, space: PowerLawSpace = "log"
) -> FitResult:
  """|y| = amplitude * x^exponent, weighted by sigma_y.

  In "log" space the fit is linear in (ln x, ln|y|) with sigma_ln = sigma_y/|y|;
  "linear" fits the power law directly, started from the log-space solution.
  """
  x = np.asarray(x, dtype=float)
  y = np.asarray(y, dtype=float)
  sigma = np.asarray(sigma_y, dtype=float)
  if not (len(x) == len(y) == len(sigma)):
    raise ValueError("x, y and sigma_y must have equal length")
  if len(x) < 3:
    raise ValueError(f"need at least 3 points for a power-law fit, got {len(x)}")
  if np.any(x <= 0):
    raise ValueError("x must be positive")
  if np.any(y == 0) or (np.any(y > 0) and np.any(y < 0)):
    raise ValueError("y must be non-zero and of one sign")
  if np.any(sigma <= 0):
    raise ValueError("sigma_y must be positive")
  magnitude = np.abs(y)

  line, cov_line, chi2 = _weighted_line(
    np.log(x), np.log(magnitude), sigma / magnitude
  )
  exponent, log_amp = line
  amplitude = float(np.exp(log_amp))
  # (exponent, ln A) -> (A, exponent)
  jac = np.array([[0.0, amplitude], [1.0, 0.0]])
  cov = jac @ cov_line @ jac.T
  values = np.array([amplitude, exponent])

  if space == "linear":
    popt, pcov = curve_fit(
      lambda t, a, p: a * t**p,
      x,
      magnitude,
      p0=values,
      sigma=sigma,
      absolute_sigma=True,
      maxfev=5000,
    )
    if not np.all(np.isfinite(pcov)):
      raise NumericalError("linear-space power-law covariance is singular")
    values, cov = popt, pcov
    chi2 = float((((magnitude - popt[0] * x ** popt[1]) / sigma) ** 2).sum())
  elif space != "log":
    raise ValueError(f"Unknown power-law space: {space}")

  return _fit_result(("amplitude", "exponent"), values, cov, chi2, len(x) - 2)


def inflate_errors(fit: FitResult, rule: InflationRule = "one_sided") -> FitResult:
  """Scale std errors by sqrt(chi2_reduced) when it exceeds 1; never deflate."""
  if rule == "none" or not isfinite(fit.chi2_reduced) or fit.chi2_reduced <= 1.0:
    return fit
  if rule != "one_sided":
    raise ValueError(f"Unknown inflation rule: {rule}")
  factor = sqrt(fit.chi2_reduced)
  return replace(
    fit,
    std_errors=np.sqrt(np.clip(np.diag(fit.covariance), 0.0, None)) * factor,
    inflation_applied=factor,
  )


# Full chain


@dataclass(frozen=True)
class AnalysisSettings:
  linear_max: float | None = DEFAULT_LINEAR_MAX
  inflation: InflationRule = "one_sided"
  space: PowerLawSpace = "log"
  phi_pkpk_rel: float = 0.075
  power_drift_rel: float = 0.10
  knee_drop: float = DEFAULT_KNEE_DROP


@dataclass(frozen=True)
class BeatNotePhase:
  """Pooled beat-note cross-phase of one level at its nominal signal power."""

  level: int
  signal_power: float  # W
  result: PulsePhaseResult


@dataclass(frozen=True)
class LevelSlope:
  level: int
  n_star: float
  fit: FitResult
  od: float
  phi_pkpk: float
  rescaled: RescaledSlope
  points_used: int
  knee_power: float | None = None
  spectroscopy: FitResult | None = None
  beatnote: BeatNotePhase | None = None
  flags: tuple[str, ...] = ()

  @property
  def od_source(self) -> OdSource:
    return "dataset" if self.spectroscopy is None else "spectrum_fit"

  def line_phase(self, signal_power: float) -> float:
    """Phase of the fitted line at `signal_power`, undoing the OD normalization."""
    return (self.fit["slope"] * signal_power + self.fit["intercept"]) * self.od

  def _beatnote_json(self) -> BeatNotePhaseJson | None:
    if self.beatnote is None:
      return None
    b = self.beatnote
    return {
      "signal_power_w": b.signal_power,
      "phase_rad": b.result.mean,
      "sem_rad": b.result.sem,
      "pulses": b.result.n_pulses,
      "line_phase_rad": self.line_phase(b.signal_power),
      "flags": list(b.result.flags),
    }

  def as_json(self) -> LevelSlopeJson:
    spectroscopy = self.spectroscopy
    return {
      "level": self.level,
      "n_star": self.n_star,
      "slope_rad_per_w": self.fit["slope"],
      "slope_err_rad_per_w": self.fit.error("slope"),
      "od": self.od,
      "phi_pkpk_rad": self.phi_pkpk,
      "od_source": self.od_source,
      "rescaled": self.rescaled.value,
      "rescaled_err": self.rescaled.error,
      "points_used": self.points_used,
      "spectroscopy": None if spectroscopy is None else spectroscopy.as_json(),
      "beatnote": self._beatnote_json(),
      "flags": list(self.flags),
    }


@dataclass(frozen=True)
class AnalysisReport:
  levels: list[LevelSlope]
  power_law: FitResult
  power_law_inflated: FitResult
  points: list[XPhaseMeasurement] = field(default_factory=list)

  def curve(self, n_star: ArrayLike) -> FloatArray:
    """Fitted |rescaled slope| at the given effective quantum numbers."""
    n_star = np.asarray(n_star, dtype=float)
    return self.power_law["amplitude"] * n_star ** self.power_law["exponent"]

  def as_json(self) -> AnalysisReportJson:
    return {
      "levels": [lv.as_json() for lv in self.levels],
      "power_law": self.power_law.as_json(),
      "power_law_inflated": self.power_law_inflated.as_json(),
    }


def analyze_sweep(
  points: Sequence[XPhaseMeasurement],
  settings: AnalysisSettings | None = None,
  warn: bool = True,
  spectroscopy: Mapping[int, FitResult] | None = None,
  beatnotes: Mapping[int, BeatNotePhase] | None = None,
) -> AnalysisReport:
  """Per-level slope fits, rescaling and the power-law fit over levels.

  A level with a spectroscopy fit takes OD and phi_pkpk from it instead of
  the dataset's columns. Beat-note phases are carried into the report next to
  the fitted line they should agree with.
  """
  settings = settings or AnalysisSettings()
  spectroscopy = spectroscopy or {}
  beatnotes = beatnotes or {}
  if not points:
    raise ValueError("no measurements to analyze")

  levels: list[LevelSlope] = []
  ordered = sorted(points, key=lambda p: (p.level, p.signal_power))
  for level, group in groupby(ordered, key=lambda p: p.level):
    rows = list(group)
    scan = spectroscopy.get(level)
    if scan is not None:
      rows = [replace(r, od=scan["od"], phi_pkpk=scan["phi_pkpk"]) for r in rows]
    fit = fit_linear_slope(normalize_by_od(rows), settings.linear_max, warn=warn)
    limit = settings.linear_max
    used = [r for r in rows if limit is None or r.signal_power <= limit]
    od = float(np.mean([r.od for r in used]))
    pkpk = float(np.mean([r.phi_pkpk for r in used]))
    rescaled = rescale_slope(
      fit,
      od,
      pkpk,
      settings.phi_pkpk_rel,
      settings.power_drift_rel,
      od_normalized=True,
    )
    knee = detect_saturation_knee(rows, settings.knee_drop, warn=warn)
    flags = fit.flags + (("saturation_knee",) if knee is not None else ())
    if scan is not None:
      flags += scan.flags
    levels.append(
      LevelSlope(
        level=level,
        n_star=rows[0].n_star,
        fit=fit,
        od=od,
        phi_pkpk=pkpk,
        rescaled=rescaled,
        points_used=len(used),
        knee_power=knee,
        spectroscopy=scan,
        beatnote=beatnotes.get(level),
        flags=flags,
      )
    )

  power_law = fit_power_law(
    [lv.n_star for lv in levels],
    [lv.rescaled.value for lv in levels],
    [lv.rescaled.error for lv in levels],
    space=settings.space,
  )
  return AnalysisReport(
    levels=levels,
    power_law=power_law,
    power_law_inflated=inflate_errors(power_law, settings.inflation),
    points=list(points),
  )
