"""Three-level ladder EIT response: spectra, window, group delay, photon counting."""

from dataclasses import dataclass, field, replace
from math import log, pi

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.constants import c, h, hbar
from scipy.optimize import brentq

from ..types.rydberg import AreaConvention, MediumParamsJson
from .atoms import RB85, Species
from .errors import NumericalError

FloatArray = NDArray[np.float64]

# points closer than this to resonance (in units of Gamma) count for group delay
GROUP_DELAY_NEIGHBOURHOOD = 0.1
MIN_SPECTRUM_SPAN = 3.0
CONTRAST_BRACKET_STEPS = 60


def beam_area(waist: float, convention: AreaConvention = "full") -> float:
  """Probe focus area: pi w^2 ("full") or pi w^2 / 2 ("half")."""
  if waist <= 0:
    raise ValueError(f"waist must be positive, got {waist!r}")
  if convention == "full":
    return pi * waist**2
  if convention == "half":
    return pi * waist**2 / 2
  raise ValueError(f"Unknown area convention: {convention}")


@dataclass(frozen=True)
class MediumParams:
  """Cold-cloud and laser parameters entering the EIT and Kerr models.

  Angular frequencies are in rad/s, lengths in m, density in atoms/m^3.
  """

  density: float
  length: float
  probe_waist: float
  omega_c: float
  species: Species = RB85
  gamma_rel: float = 0.0
  delta_c: float = 0.0
  omega_p: float = 0.0
  omega_s: float = 0.0
  area_convention: AreaConvention = "full"
  beam_area: float = field(default=0.0)

  def __post_init__(self) -> None:
    for name in ("density", "length", "probe_waist"):
      value = getattr(self, name)
      if value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    if self.omega_c < 0:
      raise ValueError(f"omega_c must be non-negative, got {self.omega_c!r}")
    if self.gamma_rel < 0:
      raise ValueError(f"gamma_rel must be non-negative, got {self.gamma_rel!r}")
    if self.omega_p < 0 or self.omega_s < 0:
      raise ValueError("probe and signal Rabi frequencies must be non-negative")
    if self.beam_area == 0.0:
      object.__setattr__(
        self, "beam_area", beam_area(self.probe_waist, self.area_convention)
      )
    elif self.beam_area < 0:
      raise ValueError(f"beam_area must be positive, got {self.beam_area!r}")

  @classmethod
  def from_od(
    cls,
    od: float,
    length: float,
    probe_waist: float,
    omega_c: float,
    species: Species = RB85,
    **kwargs: float | str,
  ) -> "MediumParams":
    """Build a medium with a prescribed optical depth by setting rho = OD/(sigma L)."""
    if od <= 0:
      raise ValueError(f"od must be positive, got {od!r}")
    if length <= 0:
      raise ValueError(f"length must be positive, got {length!r}")
    return cls(
      density=od / (species.resonant_cross_section * length),
      length=length,
      probe_waist=probe_waist,
      omega_c=omega_c,
      species=species,
      **kwargs,  # type: ignore[arg-type]
    )

  @property
  def gamma(self) -> float:
    return self.species.natural_linewidth

  @property
  def cross_section(self) -> float:
    return self.species.resonant_cross_section

  @property
  def od(self) -> float:
    return self.density * self.cross_section * self.length

  def with_od(self, od: float) -> "MediumParams":
    return replace(self, density=od / (self.cross_section * self.length))

  def coupling_off(self) -> "MediumParams":
    return replace(self, omega_c=0.0)

  def as_json(self) -> MediumParamsJson:
    return {
      "species": self.species.name,
      "density_m3": self.density,
      "length_m": self.length,
      "probe_waist_m": self.probe_waist,
      "beam_area_m2": self.beam_area,
      "od": self.od,
      "omega_c_rad_s": self.omega_c,
      "omega_p_rad_s": self.omega_p,
      "omega_s_rad_s": self.omega_s,
      "gamma_rad_s": self.gamma,
      "gamma_rel_rad_s": self.gamma_rel,
      "delta_c_rad_s": self.delta_c,
    }


@dataclass(frozen=True)
class Spectrum:
  """Probe transmission and phase on a detuning grid (rad/s)."""

  detunings: FloatArray
  transmission: FloatArray
  phase: FloatArray
  params: MediumParams

  def __post_init__(self) -> None:
    n = len(self.detunings)
    if len(self.transmission) != n or len(self.phase) != n:
      raise ValueError("detunings, transmission and phase must have equal length")
    if n < 2 or np.any(np.diff(self.detunings) <= 0):
      raise ValueError("detunings must be strictly increasing")
    if np.any(self.transmission < 0) or np.any(self.transmission > 1):
      raise ValueError("transmission must lie in [0, 1]")


def eit_window(omega_c: float, gamma: float) -> float:
  """Delta_EIT = Omega_c^2 / (2 Gamma)."""
  if omega_c <= 0 or gamma <= 0:
    raise ValueError(
      f"omega_c and gamma must be positive, got omega_c={omega_c!r}, gamma={gamma!r}"
    )
  return omega_c**2 / (2.0 * gamma)


def susceptibility(delta_p: ArrayLike, m: MediumParams) -> NDArray[np.complex128]:
  """Normalized weak-probe response of the resonant-coupling ladder system.

  Scaled so that Im = 1 on bare resonance; T = exp(-OD Im), phi = (OD/2) Re.
  With gamma_rel = 0 the two-photon resonance is a perfect dark state.
  """
  delta = np.asarray(delta_p, dtype=float)
  half = m.gamma / 2.0
  denominator = half - 1j * delta
  if m.omega_c == 0:
    return 1j * half / denominator

  two_photon = m.gamma_rel - 1j * (delta + m.delta_c)
  dark = two_photon == 0
  denominator = denominator + (m.omega_c**2 / 4.0) / np.where(dark, 1.0, two_photon)
  return np.where(dark, 0j, 1j * half / denominator)


def detuning_grid(
  gamma: float, span: float = 4.0, points: int = 2001
) -> FloatArray:
  """Symmetric probe-detuning grid of +-span*Gamma; odd counts include resonance."""
  if span <= 0 or points < 3:
    raise ValueError("span must be positive and points at least 3")
  return np.linspace(-span * gamma, span * gamma, points)


def spectrum(m: MediumParams, grid: ArrayLike) -> Spectrum:
  """Deterministic transmission/phase spectrum of the medium on `grid`."""
  detunings = np.asarray(grid, dtype=float)
  if detunings.ndim != 1 or len(detunings) < 3:
    raise ValueError("grid must be a one-dimensional array of at least 3 points")
  if np.any(np.diff(detunings) <= 0):
    raise ValueError("grid must be strictly increasing")
  reach = MIN_SPECTRUM_SPAN * m.gamma * (1 - 1e-9)
  if detunings[0] > -reach or detunings[-1] < reach:
    raise ValueError(
      f"grid must span at least +-{MIN_SPECTRUM_SPAN:g} Gamma around resonance"
    )

  chi = susceptibility(detunings, m)
  transmission = np.exp(-m.od * chi.imag)
  phase = (m.od / 2.0) * chi.real
  return Spectrum(
    detunings=detunings,
    transmission=np.clip(transmission, 0.0, 1.0),
    phase=phase,
    params=m,
  )


def phi_pkpk(s: Spectrum) -> float:
  """Peak-to-peak phase of the EIT dispersive feature.

  Max phase on 0 <= Delta_p <= Omega_c minus min phase on -Omega_c <= Delta_p <= 0,
  floored at zero; the far-wing dispersion of the bare line is excluded.
  """
  omega_c = s.params.omega_c
  if omega_c == 0:
    return 0.0
  d = s.detunings
  if d[0] > -omega_c or d[-1] < omega_c:
    raise ValueError(
      "spectrum grid does not bracket the EIT window |Delta_p| <= Omega_c"
    )
  upper = (d >= 0) & (d <= omega_c)
  lower = (d <= 0) & (d >= -omega_c)
  if upper.sum() < 3 or lower.sum() < 3:
    raise ValueError("too few grid points inside the EIT window to locate its extrema")
  return max(0.0, float(s.phase[upper].max() - s.phase[lower].min()))


def group_delay(s: Spectrum) -> float:
  """tau_g = d phi / d Delta_p at resonance, by centered finite difference."""
  d = s.detunings
  near = np.abs(d) <= GROUP_DELAY_NEIGHBOURHOOD * s.params.gamma
  if near.sum() < 3:
    raise ValueError("need at least 3 grid points near resonance for the group delay")
  i0 = int(np.argmin(np.abs(d)))
  if i0 == 0 or i0 == len(d) - 1:
    raise ValueError("resonance must be interior to the grid")
  window = slice(i0 - 1, i0 + 2)
  return float(np.gradient(s.phase[window], d[window])[1])


def group_delay_analytic(m: MediumParams) -> float:
  """Closed-form derivative of the implemented lineshape at resonance (delta_c = 0)."""
  if m.delta_c != 0:
    raise ValueError("analytic group delay assumes a resonant coupling beam")
  a = m.gamma / 2.0
  scale = m.od / 2.0
  if m.omega_c == 0:
    return -scale / a
  b = m.omega_c**2 / 4.0
  g = m.gamma_rel
  if g == 0:
    return scale * a / b
  return scale * a * (b / g**2 - 1.0) / (a + b / g) ** 2


def transparency_on_resonance(m: MediumParams) -> float:
  """Probe transmission at Delta_p = 0."""
  return float(np.exp(-m.od * susceptibility(0.0, m).imag))


def calibrate_gamma_rel(m: MediumParams, transparency: float) -> float:
  """Dephasing rate giving the requested on-resonance transmission.

  Inverts T(0) = exp(-OD a / (a + b/gamma_rel)) with a = Gamma/2, b = Omega_c^2/4.
  """
  if m.omega_c <= 0:
    raise ValueError("calibrating gamma_rel needs a coupling beam")
  if m.delta_c != 0:
    raise ValueError("calibrating gamma_rel assumes a resonant coupling beam")
  floor = np.exp(-m.od)
  if not floor < transparency < 1.0:
    raise ValueError(
      f"transparency must lie in ({floor:.4f}, 1) for OD={m.od:.3f}, got {transparency!r}"
    )
  a = m.gamma / 2.0
  b = m.omega_c**2 / 4.0
  dressing = a * (m.od / -log(transparency) - 1.0)
  return b / dressing


def dephasing_for_contrast(m: MediumParams, fraction: float) -> float:
  """gamma_rel that scales the medium's phi_pkpk by `fraction`.

  Solved on the feature grid by bracketing: phi_pkpk falls to zero as the
  dephasing washes out the dark state.
  """
  if not 0 < fraction <= 1:
    raise ValueError(f"fraction must lie in (0, 1], got {fraction!r}")
  if m.omega_c <= 0:
    raise ValueError("phi_pkpk contrast needs a coupling beam")
  grid = feature_grid(m)
  reference = phi_pkpk(spectrum(m, grid))
  if fraction == 1 or reference == 0:
    return m.gamma_rel

  def excess(gamma_rel: float) -> float:
    pkpk = phi_pkpk(spectrum(replace(m, gamma_rel=gamma_rel), grid))
    return pkpk - fraction * reference

  lower = m.gamma_rel
  upper = max(m.gamma_rel, 1e-3 * m.gamma)
  for _ in range(CONTRAST_BRACKET_STEPS):
    upper *= 2.0
    if excess(upper) < 0:
      break
  else:
    raise NumericalError(
      f"no dephasing rate reduces phi_pkpk to {fraction:.3g} of its value"
    )
  return float(brentq(excess, lower, upper, xtol=1e-12 * m.gamma, rtol=1e-14))


def photon_energy(wavelength: float) -> float:
  if wavelength <= 0:
    raise ValueError(f"wavelength must be positive, got {wavelength!r}")
  return h * c / wavelength


def photons_in_medium(power: float, dwell: float, wavelength: float) -> float:
  """Mean photon number present for a dwell time: P tau lambda / (h c)."""
  if power < 0:
    raise ValueError(f"power must be non-negative, got {power!r}")
  if dwell <= 0:
    raise ValueError(f"dwell must be positive, got {dwell!r}")
  return power * dwell / photon_energy(wavelength)


def rabi_frequency_squared(power: float, area: float, species: Species = RB85) -> float:
  """|Omega|^2 = sigma Gamma P / (A hbar omega) for a beam of `power` over `area`."""
  if power < 0:
    raise ValueError(f"power must be non-negative, got {power!r}")
  if area <= 0:
    raise ValueError(f"area must be positive, got {area!r}")
  omega = 2 * pi * c / species.probe_wavelength
  return (
    species.resonant_cross_section * species.natural_linewidth * power
    / (area * hbar * omega)
  )


def power_from_rabi_squared(
  omega_sq: float, area: float, species: Species = RB85
) -> float:
  """Inverse of rabi_frequency_squared."""
  return omega_sq / rabi_frequency_squared(1.0, area, species)


def feature_grid(m: MediumParams, points: int = 4001) -> FloatArray:
  """Grid wide enough for both the bare line (+-4 Gamma) and the EIT feature."""
  span = max(MIN_SPECTRUM_SPAN + 1.0, 1.5 * m.omega_c / m.gamma)
  return detuning_grid(m.gamma, span=span, points=points)


def experiment_medium(species: Species = RB85) -> MediumParams:
  """Typical cloud: 3e10 atoms/cm^3, 0.5 mm long, 20 um probe waist, Omega_c = 2pi x 7 MHz."""
  return MediumParams(
    density=3e16,
    length=0.5e-3,
    probe_waist=20e-6,
    omega_c=2 * pi * 7e6,
    species=species,
  )
