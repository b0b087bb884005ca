"""Type definitions for serialized results and enumerated options."""

from typing import Literal, NotRequired, TypedDict

# Option literals
C6Mode = Literal["ns_fit", "power_law"]
AreaConvention = Literal["full", "half"]
PulseSpacing = Literal["period", "gap"]
PowerLawSpace = Literal["log", "linear"]
InflationRule = Literal["one_sided", "none"]
OdSource = Literal["dataset", "spectrum_fit"]
MonteCarloSampler = Literal["volume", "radial"]


class Provenance(TypedDict):
  toolkit: str
  version: str
  config_hash: str
  command: str


class MediumParamsJson(TypedDict):
  species: str
  density_m3: float
  length_m: float
  probe_waist_m: float
  beam_area_m2: float
  od: float
  omega_c_rad_s: float
  omega_p_rad_s: float
  omega_s_rad_s: float
  gamma_rad_s: float
  gamma_rel_rad_s: float
  delta_c_rad_s: float
  level: NotRequired[int]


class CrossKerrResultJson(TypedDict):
  phase_rad: float
  r_b_m: float
  rydberg_density_m3: float
  validity_ratio: float
  chi3_m2V2: float | None
  per_photon_phase_rad: float | None


class FitResultJson(TypedDict):
  names: list[str]
  params: dict[str, float]
  std_errors: dict[str, float]
  covariance: list[list[float]]
  chi2_reduced: float
  dof: int
  inflation_applied: float
  flags: list[str]


class BeatNoteHeader(TypedDict):
  sample_rate_hz: float
  beat_frequency_hz: float
  n_samples: int
  level: int
  signal_power_w: float
  phase_step_rad: float
  markers: list[list[list[int]]]  # pulse -> (before, during, after) -> [start, stop)
  provenance: NotRequired[Provenance]


class BeatNotePhaseJson(TypedDict):
  signal_power_w: float
  phase_rad: float
  sem_rad: float
  pulses: int
  line_phase_rad: float
  flags: list[str]


class LevelSlopeJson(TypedDict):
  level: int
  n_star: float
  slope_rad_per_w: float
  slope_err_rad_per_w: float
  od: float
  phi_pkpk_rad: float
  od_source: OdSource
  rescaled: float
  rescaled_err: float
  points_used: int
  spectroscopy: FitResultJson | None
  beatnote: BeatNotePhaseJson | None
  flags: list[str]


class AnalysisReportJson(TypedDict):
  levels: list[LevelSlopeJson]
  power_law: FitResultJson
  power_law_inflated: FitResultJson
  provenance: NotRequired[Provenance]


class ReferenceNonlinearity(TypedDict):
  description: str
  chi3_real_m2V2: float
  chi3_imag_m2V2: float
  phi0_urad_per_photon: float | None
  note: str
