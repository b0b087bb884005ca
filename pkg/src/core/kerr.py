"""The van der Waals cross-Kerr model.

The ensemble cross-phase is evaluated three independent ways: the exact
closed form, adaptive quadrature of the radial integral, and a seeded
Monte-Carlo pair sum. Saturation of the Rydberg density and the conversions
to chi(3) and per-photon phase live here too.
"""

from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from math import ceil, inf, isfinite, pi, sqrt

import click
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.constants import c, epsilon_0
from scipy.integrate import quad
from tqdm import tqdm

from ..types.rydberg import (
  AreaConvention,
  CrossKerrResultJson,
  MonteCarloSampler,
  ReferenceNonlinearity,
)
from .atoms import RydbergState
from .eit import (
  MediumParams,
  beam_area,
  eit_window,
  group_delay_analytic,
  photon_energy,
  power_from_rabi_squared,
  rabi_frequency_squared,
)
from .errors import NumericalError

# int_0^inf s^8 / (1 + s^12) ds
CORE_INTEGRAL = pi / (6 * sqrt(2))
CLOSED_FORM_PREFACTOR = pi / (2 * sqrt(2))
FULL_FORM_PREFACTOR = sqrt(2) * pi**2 / 3

# quadrature runs on [0, TAIL_START]; the rest is a convergent series
TAIL_START = 10.0
TAIL_TERMS = 4
QUAD_TOLERANCE = 1e-9

VALIDITY_WARN = 0.1
MC_MIN_SAMPLES = 1000
MC_CHUNK = 1 << 15
# ground atoms are drawn up to this many r_b beyond the probe column
MC_PADDING = 6.0

REFERENCE_NONLINEARITIES: list[ReferenceNonlinearity] = [
  {
    "description": "Fused silica",
    "chi3_real_m2V2": 2.5e-22,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": None,
    "note": "conventional material",
  },
  {
    "description": "EIT, BEC",
    "chi3_real_m2V2": 5e-7,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": None,
    "note": "slow light at BEC densities",
  },
  {
    "description": "Rydberg self-Kerr (dissipative)",
    "chi3_real_m2V2": 0.0,
    "chi3_imag_m2V2": 5e-7,
    "phi0_urad_per_photon": None,
    "note": "imaginary chi(3)",
  },
  {
    "description": "Rydberg cross-Kerr, resonant EIT",
    "chi3_real_m2V2": 1e-8,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": 250.0,
    "note": "per-photon phase inferred from group delay, not measured directly",
  },
  {
    "description": "Rydberg self-Kerr, cavity",
    "chi3_real_m2V2": 5e-9,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": None,
    "note": "off-resonant Rydberg EIT",
  },
  {
    "description": "N-scheme, MOT",
    "chi3_real_m2V2": 2e-9,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": 13.0,
    "note": "EIT plus AC Stark shift",
  },
  {
    "description": "N-scheme, hollow-core fibre",
    "chi3_real_m2V2": 1e-12,
    "chi3_imag_m2V2": 0.0,
    "phi0_urad_per_photon": 300.0,
    "note": "cold atoms in hollow-core fibre",
  },
]


def _warn(message: str) -> None:
  click.echo(f"⚠️  {click.style('Warning:', fg='yellow', bold=True)} {message}", err=True)


@dataclass(frozen=True)
class KerrInputs:
  """Medium, Rydberg level, EIT window and beam powers for one model evaluation."""

  medium: MediumParams
  state: RydbergState
  delta_eit: float
  signal_power: float = 0.0
  probe_power: float = 0.0

  def __post_init__(self) -> None:
    if self.signal_power < 0 or self.probe_power < 0:
      raise ValueError("signal and probe powers must be non-negative")
    expected = eit_window(self.medium.omega_c, self.medium.gamma)
    if abs(self.delta_eit - expected) > 1e-9 * expected:
      raise ValueError(
        f"delta_eit={self.delta_eit!r} inconsistent with Omega_c^2/(2 Gamma)={expected!r}"
      )

  @property
  def r_b(self) -> float:
    return blockade_radius(self.state.C6, self.delta_eit)

  @property
  def blockade_volume(self) -> float:
    return 4.0 / 3.0 * pi * self.r_b**3

  def with_signal_power(self, signal_power: float) -> "KerrInputs":
    return kerr_inputs(self.medium, self.state, signal_power, self.probe_power)


def kerr_inputs(
  medium: MediumParams,
  state: RydbergState,
  signal_power: float = 0.0,
  probe_power: float = 0.0,
) -> KerrInputs:
  """Map beam powers onto Rabi frequencies and bundle the model inputs."""
  omega_s = sqrt(rabi_frequency_squared(signal_power, medium.beam_area, medium.species))
  omega_p = sqrt(rabi_frequency_squared(probe_power, medium.beam_area, medium.species))
  return KerrInputs(
    medium=replace(medium, omega_s=omega_s, omega_p=omega_p),
    state=state,
    delta_eit=eit_window(medium.omega_c, medium.gamma),
    signal_power=signal_power,
    probe_power=probe_power,
  )


@dataclass(frozen=True)
class CrossKerrResult:
  phase: float  # rad, negative for attractive vdW
  r_b: float
  rydberg_density: float
  blockade_volume: float
  chi3: float | None = None
  per_photon_phase: float | None = None
  flags: tuple[str, ...] = ()

  def __post_init__(self) -> None:
    if not isfinite(self.phase):
      raise NumericalError(f"cross-phase is not finite: {self.phase!r}")
    if self.rydberg_density < 0:
      raise ValueError("rydberg_density must be non-negative")

  @property
  def validity_ratio(self) -> float:
    return self.rydberg_density * self.blockade_volume

  def as_json(self) -> CrossKerrResultJson:
    return {
      "phase_rad": self.phase,
      "r_b_m": self.r_b,
      "rydberg_density_m3": self.rydberg_density,
      "validity_ratio": self.validity_ratio,
      "chi3_m2V2": self.chi3,
      "per_photon_phase_rad": self.per_photon_phase,
    }


@dataclass(frozen=True)
class MonteCarloEstimate:
  mean: float
  stderr: float
  n_samples: int


def vdw_potential(r: ArrayLike, C6: float) -> NDArray[np.float64]:
  """V(r)/hbar = -C6 / r^6, in rad/s."""
  r = np.asarray(r, dtype=float)
  if np.any(r <= 0):
    raise ValueError("interatomic distance must be positive")
  return -C6 / r**6


def per_atom_phase(r: ArrayLike, k: KerrInputs) -> NDArray[np.float64]:
  """Probe phase from one ground atom at distance r from a Rydberg excitation.

  phi_X = (sigma/A) Delta V / (Delta^2 + V^2); with V < 0 the phase is negative,
  peaks in magnitude at r = r_b with (sigma/A)/2 and vanishes deep inside r_b.
  """
  potential = vdw_potential(r, k.state.C6)
  x = -potential / k.delta_eit
  with np.errstate(divide="ignore", over="ignore"):
    lorentz = 1.0 / (x + 1.0 / x)
  return -(k.medium.cross_section / k.medium.beam_area) * lorentz


def blockade_radius(C6: float, delta_eit: float) -> float:
  """r_b = (C6 / Delta_EIT)^(1/6)."""
  if C6 <= 0 or delta_eit <= 0:
    raise ValueError(
      f"C6 and delta_eit must be positive, got C6={C6!r}, delta_eit={delta_eit!r}"
    )
  return (C6 / delta_eit) ** (1.0 / 6.0)


def rydberg_density(density: float, omega_s: float, omega_c: float) -> float:
  """Low-power Rydberg density rho |Omega_s|^2 / |Omega_c|^2."""
  if omega_c == 0:
    raise ValueError("omega_c must be non-zero")
  if density < 0:
    raise ValueError(f"density must be non-negative, got {density!r}")
  return density * omega_s**2 / omega_c**2


def saturated_rydberg_density(
  density: float, omega_s: float, omega_p: float, omega_c: float, blockade_volume: float
) -> float:
  """rho x / (1 + rho x V_b) with x = (|Omega_s|^2 + |Omega_p|^2) / |Omega_c|^2."""
  if omega_c == 0:
    raise ValueError("omega_c must be non-zero")
  if blockade_volume <= 0:
    raise ValueError(f"blockade_volume must be positive, got {blockade_volume!r}")
  rho_x = density * (omega_s**2 + omega_p**2) / omega_c**2
  return rho_x / (1.0 + rho_x * blockade_volume)


def cross_phase_closed(od: float, r_b: float, rho_ryd: float) -> float:
  """-(pi / 2 sqrt 2) OD [(4/3) pi r_b^3 rho_ryd]."""
  if od < 0 or r_b <= 0 or rho_ryd < 0:
    raise ValueError("od, r_b and rho_ryd must be positive")
  return -CLOSED_FORM_PREFACTOR * od * (4.0 / 3.0 * pi * r_b**3 * rho_ryd)


def _tail(s: float) -> float:
  """int_s^inf t^8/(1+t^12) dt for s >= 1, as an alternating series in s^-12."""
  if s == inf:
    return 0.0
  return sum(
    (-1) ** j * s ** -(3 + 12 * j) / (3 + 12 * j) for j in range(TAIL_TERMS)
  )


def shell_integral(lower: float = 0.0, upper: float = inf) -> float:
  """Dimensionless core int_lower^upper s^8 / (1 + s^12) ds."""
  if lower < 0 or upper < lower:
    raise ValueError(f"invalid integration range [{lower}, {upper}]")
  total = 0.0
  head_upper = min(upper, TAIL_START)
  if lower < head_upper:
    value, error = quad(
      lambda s: s**8 / (1.0 + s**12),
      lower,
      head_upper,
      epsabs=1e-13,
      epsrel=1e-12,
      limit=200,
    )
    if error > QUAD_TOLERANCE:
      raise NumericalError("radial quadrature did not converge", residual_norm=error)
    total += value
  if upper > TAIL_START:
    total += _tail(max(lower, TAIL_START)) - _tail(upper)
  return total


def shell_fraction(lower: float, upper: float) -> float:
  """Share of the ensemble phase carried by atoms with lower <= r/r_b <= upper."""
  return shell_integral(lower, upper) / shell_integral()


def radial_integrand(s: ArrayLike) -> NDArray[np.float64]:
  s = np.asarray(s, dtype=float)
  return s**8 / (1.0 + s**12)


def cross_phase_quadrature(k: KerrInputs) -> float:
  """Ensemble phase by integrating per-atom phases over a Rydberg excitation's shell."""
  medium = k.medium
  rho_ryd = rydberg_density(medium.density, medium.omega_s, medium.omega_c)
  if rho_ryd == 0:
    return 0.0
  r_b = k.r_b
  excitations = rho_ryd * medium.beam_area * medium.length
  peak = -medium.cross_section / medium.beam_area
  # phi_X(r_b s) = peak * s^6/(1+s^12); 4 pi r^2 rho dr = 4 pi rho r_b^3 s^2 ds
  return excitations * peak * 4 * pi * medium.density * r_b**3 * shell_integral()


def _proposal_radius(rng: np.random.Generator, n: int) -> NDArray[np.float64]:
  """s ~ q(s) = 3 (1+s)^-4 on (0, inf), heavy enough to cover the s^-4 tail."""
  u = rng.random(n)
  u[u == 0] = np.finfo(float).tiny
  return u ** (-1.0 / 3.0) - 1.0


def _unit_vectors(rng: np.random.Generator, n: int) -> NDArray[np.float64]:
  cos_theta = rng.uniform(-1.0, 1.0, n)
  azimuth = rng.uniform(0.0, 2 * pi, n)
  sin_theta = np.sqrt(1.0 - cos_theta**2)
  return np.column_stack(
    (sin_theta * np.cos(azimuth), sin_theta * np.sin(azimuth), cos_theta)
  )


def _column_points(
  rng: np.random.Generator, n: int, radius: float, length: float
) -> NDArray[np.float64]:
  rho = radius * np.sqrt(rng.random(n))
  azimuth = rng.uniform(0.0, 2 * pi, n)
  return np.column_stack(
    (rho * np.cos(azimuth), rho * np.sin(azimuth), rng.uniform(0.0, length, n))
  )


def _radial_chunk(
  k: KerrInputs, seed: np.random.SeedSequence, n: int, clip_to_column: bool
) -> tuple[float, float]:
  """Sum and sum of squares of pair weights, ground atoms importance-sampled in r."""
  rng = np.random.default_rng(seed)
  medium = k.medium
  r_b = k.r_b
  column_radius = sqrt(medium.beam_area / pi)

  excitations = _column_points(rng, n, column_radius, medium.length)
  s = _proposal_radius(rng, n)
  ground = excitations + (r_b * s)[:, None] * _unit_vectors(rng, n)

  r = np.linalg.norm(ground - excitations, axis=1)
  r[r == 0] = np.finfo(float).tiny
  proposal = 3.0 * (1.0 + s) ** -4
  weights = per_atom_phase(r, k) * 4 * pi * r**2 * medium.density * r_b / proposal
  if clip_to_column:
    inside = (ground[:, 0] ** 2 + ground[:, 1] ** 2 <= column_radius**2) & (
      (ground[:, 2] >= 0) & (ground[:, 2] <= medium.length)
    )
    weights = np.where(inside, weights, 0.0)
  return float(weights.sum()), float((weights**2).sum())


def _volume_chunk(
  k: KerrInputs, seed: np.random.SeedSequence, n: int, clip_to_column: bool
) -> tuple[float, float]:
  """Sum and sum of squares of pair weights, ground atoms uniform in the cloud."""
  rng = np.random.default_rng(seed)
  medium = k.medium
  column_radius = sqrt(medium.beam_area / pi)
  pad = 0.0 if clip_to_column else MC_PADDING * k.r_b
  cloud_radius = column_radius + pad
  cloud_length = medium.length + 2 * pad

  excitations = _column_points(rng, n, column_radius, medium.length)
  ground = _column_points(rng, n, cloud_radius, cloud_length)
  ground[:, 2] -= pad

  r = np.linalg.norm(ground - excitations, axis=1)
  r[r == 0] = np.finfo(float).tiny
  atoms = medium.density * pi * cloud_radius**2 * cloud_length
  weights = per_atom_phase(r, k) * atoms
  return float(weights.sum()), float((weights**2).sum())


MC_CHUNKS = {"volume": _volume_chunk, "radial": _radial_chunk}


def cross_phase_montecarlo(
  k: KerrInputs,
  n_samples: int,
  seed: int,
  workers: int = 1,
  clip_to_column: bool = False,
  show_progress: bool = False,
  sampler: MonteCarloSampler = "volume",
) -> MonteCarloEstimate:
  """Seeded Monte-Carlo estimate of the ensemble cross-phase.

  Rydberg excitations are placed uniformly in the probe column at density
  rho_ryd and paired with ground atoms of the density-rho cloud; per-atom
  phases are averaged over pairs and scaled to the column's excitation count.

  The "volume" sampler draws each ground atom uniformly from the cloud, a
  cylinder reaching MC_PADDING blockade radii past the column; it neglects
  the s^-4 tail beyond that reach (about 0.4% of the phase). The "radial"
  sampler draws the pair distance from q(s) = 3 (1+s)^-4 around the
  excitation, which is much less noisy but integrates the same reduced
  radial profile as the quadrature.

  Args:
      k: Model inputs.
      n_samples: Number of ground-excitation pairs (at least 1000).
      seed: Master seed; chunks use spawned substreams so the result does not
        depend on `workers`.
      workers: Threads used to evaluate chunks.
      clip_to_column: Keep ground atoms inside the probe column only,
        measuring the edge correction the continuum integral neglects.
      show_progress: Show a progress bar over chunks.
      sampler: "volume" or "radial".

  Returns:
      Mean phase and its standard error.
  """
  if n_samples < MC_MIN_SAMPLES:
    raise ValueError(f"n_samples must be at least {MC_MIN_SAMPLES}, got {n_samples}")
  if sampler not in MC_CHUNKS:
    raise ValueError(f"unknown sampler {sampler!r}; use one of {', '.join(MC_CHUNKS)}")
  medium = k.medium
  if medium.beam_area <= 0 or medium.length <= 0 or not isfinite(k.r_b):
    raise ValueError("degenerate Monte-Carlo geometry")
  rho_ryd = rydberg_density(medium.density, medium.omega_s, medium.omega_c)
  if rho_ryd == 0:
    return MonteCarloEstimate(mean=0.0, stderr=0.0, n_samples=n_samples)

  chunk = MC_CHUNKS[sampler]
  n_chunks = ceil(n_samples / MC_CHUNK)
  sizes = [MC_CHUNK] * (n_chunks - 1) + [n_samples - MC_CHUNK * (n_chunks - 1)]
  streams = np.random.SeedSequence(seed).spawn(n_chunks)

  with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
    results: Iterator[tuple[float, float]] = pool.map(
      lambda job: chunk(k, job[0], job[1], clip_to_column), zip(streams, sizes)
    )
    total = 0.0
    total_sq = 0.0
    for chunk_sum, chunk_sq in tqdm(
      results, total=n_chunks, desc="Monte Carlo", disable=not show_progress
    ):
      total += chunk_sum
      total_sq += chunk_sq

  mean_weight = total / n_samples
  variance = max(0.0, (total_sq - n_samples * mean_weight**2) / (n_samples - 1))
  excitations = rho_ryd * medium.beam_area * medium.length
  return MonteCarloEstimate(
    mean=excitations * mean_weight,
    stderr=excitations * sqrt(variance / n_samples),
    n_samples=n_samples,
  )


def _conversions(k: KerrInputs, phase: float) -> tuple[float | None, float | None]:
  if k.signal_power == 0:
    return None, None
  medium = k.medium
  slope = phase / k.signal_power
  chi3 = chi3_from_slope(
    slope,
    medium.probe_waist,
    medium.length,
    medium.species.probe_wavelength,
    medium.area_convention,
  )
  phi0 = None
  if medium.delta_c == 0:
    tau_g = group_delay_analytic(medium)
    if tau_g > 0:
      phi0 = per_photon_phase(slope, tau_g, medium.species.probe_wavelength)
  return chi3, phi0


def _result(
  k: KerrInputs, phase: float, rho_ryd: float, validity_density: float, warn: bool
) -> CrossKerrResult:
  r_b = k.r_b
  volume = 4.0 / 3.0 * pi * r_b**3
  flags: tuple[str, ...] = ()
  ratio = validity_density * volume
  if ratio > VALIDITY_WARN:
    flags = ("validity",)
    if warn:
      _warn(
        f"rho_ryd * V_b = {ratio:.3g} exceeds {VALIDITY_WARN} for n={k.state.n}; "
        "the low-density model no longer holds"
      )
  chi3, phi0 = _conversions(k, phase)
  return CrossKerrResult(
    phase=phase,
    r_b=r_b,
    rydberg_density=rho_ryd,
    blockade_volume=volume,
    chi3=chi3,
    per_photon_phase=phi0,
    flags=flags,
  )


def cross_phase_full(k: KerrInputs, warn: bool = True) -> CrossKerrResult:
  """-(sqrt2 pi^2/3) OD sqrt(C6/Delta_EIT) |Omega_s|^2/|Omega_c|^2 rho."""
  medium = k.medium
  phase = (
    -FULL_FORM_PREFACTOR
    * medium.od
    * sqrt(k.state.C6 / k.delta_eit)
    * (medium.omega_s**2 / medium.omega_c**2)
    * medium.density
  )
  rho_ryd = rydberg_density(medium.density, medium.omega_s, medium.omega_c)
  return _result(k, phase, rho_ryd, rho_ryd, warn)


def cross_phase_saturated(k: KerrInputs, warn: bool = True) -> CrossKerrResult:
  """Cross-phase with the saturated Rydberg density.

  Probe photons add Rydberg excitations that blockade the medium without
  writing cross-phase, so only the signal's share of the saturated density
  enters the closed form.
  """
  medium = k.medium
  total = saturated_rydberg_density(
    medium.density, medium.omega_s, medium.omega_p, medium.omega_c, k.blockade_volume
  )
  drive = medium.omega_s**2 + medium.omega_p**2
  signal_share = medium.omega_s**2 / drive if drive > 0 else 0.0
  rho_signal = total * signal_share
  phase = cross_phase_closed(medium.od, k.r_b, rho_signal)
  return _result(k, phase, rho_signal, total, warn)


def half_saturation_power(k: KerrInputs) -> float:
  """Total incident power (signal plus probe) where rho_ryd^sat V_b = 1/2."""
  medium = k.medium
  omega_sq = medium.omega_c**2 / (medium.density * k.blockade_volume)
  return power_from_rabi_squared(omega_sq, medium.beam_area, medium.species)


def unblockaded_fraction(k: KerrInputs) -> float:
  """Share of the cloud outside the blockade spheres of probe-created excitations.

  1 / (1 + rho x_p V_b) with x_p = |Omega_p|^2 / |Omega_c|^2; the saturated
  signal density at vanishing signal power carries the same factor.
  """
  medium = k.medium
  probe_load = medium.density * medium.omega_p**2 / medium.omega_c**2
  return 1.0 / (1.0 + probe_load * k.blockade_volume)


def low_power_slope(k: KerrInputs, saturate: bool = False) -> float:
  """d<phi_X>/dP_s at vanishing signal power, in rad/W."""
  medium = k.medium
  d_omega_sq = rabi_frequency_squared(1.0, medium.beam_area, medium.species)
  slope = (
    -FULL_FORM_PREFACTOR
    * medium.od
    * sqrt(k.state.C6 / k.delta_eit)
    * medium.density
    * d_omega_sq
    / medium.omega_c**2
  )
  if saturate:
    slope *= unblockaded_fraction(k)
  return slope


def kerr_index_from_slope(
  slope: float,
  waist: float,
  length: float,
  wavelength: float,
  area_convention: AreaConvention = "full",
) -> float:
  """Nonlinear index n2 = slope A / (k L), in m^2/W."""
  if length <= 0 or wavelength <= 0:
    raise ValueError("length and wavelength must be positive")
  wavenumber = 2 * pi / wavelength
  return slope * beam_area(waist, area_convention) / (wavenumber * length)


def chi3_from_slope(
  slope: float,
  waist: float,
  length: float,
  wavelength: float,
  area_convention: AreaConvention = "full",
) -> float:
  """Re chi(3) = (4/3) epsilon_0 c n2 for a background index of 1, in m^2/V^2."""
  n2 = kerr_index_from_slope(slope, waist, length, wavelength, area_convention)
  return 4.0 / 3.0 * epsilon_0 * c * n2


def per_photon_phase(slope: float, group_delay: float, wavelength: float) -> float:
  """phi_0 = slope (h c / lambda) / tau_g."""
  if group_delay <= 0:
    raise ValueError(f"group_delay must be positive, got {group_delay!r}")
  return slope * photon_energy(wavelength) / group_delay


@dataclass(frozen=True)
class MethodComparison:
  """Cross-phase at one signal power by every evaluation route."""

  signal_power: float
  closed: float
  quadrature: float
  montecarlo: MonteCarloEstimate | None
  full: CrossKerrResult
  saturated: CrossKerrResult

  @property
  def quadrature_rel_diff(self) -> float:
    if self.closed == 0:
      return abs(self.quadrature)
    return abs(self.quadrature - self.closed) / abs(self.closed)

  @property
  def montecarlo_z(self) -> float | None:
    if self.montecarlo is None:
      return None
    if self.montecarlo.stderr == 0:
      return 0.0 if self.montecarlo.mean == self.closed else inf
    return (self.montecarlo.mean - self.closed) / self.montecarlo.stderr


def compare_methods(
  k: KerrInputs,
  mc_samples: int = 0,
  seed: int = 0,
  workers: int = 1,
  warn: bool = True,
  sampler: MonteCarloSampler = "volume",
) -> MethodComparison:
  """Closed form, quadrature, optional Monte Carlo and the saturated variant."""
  medium = k.medium
  rho_ryd = rydberg_density(medium.density, medium.omega_s, medium.omega_c)
  closed = cross_phase_closed(medium.od, k.r_b, rho_ryd)
  mc = None
  if mc_samples:
    mc = cross_phase_montecarlo(k, mc_samples, seed, workers=workers, sampler=sampler)
  return MethodComparison(
    signal_power=k.signal_power,
    closed=closed,
    quadrature=cross_phase_quadrature(k),
    montecarlo=mc,
    full=cross_phase_full(k, warn=warn),
    saturated=cross_phase_saturated(k, warn=False),
  )
