"""Atomic species data and Rydberg-level scaling."""

from dataclasses import dataclass, field, replace
from math import pi

from scipy.constants import hbar, physical_constants

from ..types.rydberg import C6Mode

# Rb nS1/2 van der Waals fit, atomic units: C6 = n^11 (c0 + c1 n + c2 n^2)
NS_C6_FIT_COEFFS = (11.97, -0.8486, 3.385e-3)

# atomic unit of C6 (E_h a0^6) expressed as hbar * (rad/s) * m^6
_EH = physical_constants["atomic unit of energy"][0]
_A0 = physical_constants["Bohr radius"][0]
C6_ATOMIC_UNIT = _EH * _A0**6 / hbar

DEFAULT_MIN_N = 30


def resonant_cross_section(wavelength: float) -> float:
  """Two-level resonant cross section 3 lambda^2 / (2 pi), in m^2."""
  if wavelength <= 0:
    raise ValueError(f"wavelength must be positive, got {wavelength!r}")
  return 3.0 * wavelength**2 / (2.0 * pi)


@dataclass(frozen=True)
class Species:
  """Probe transition and Rydberg-series data for one alkali species."""

  name: str
  probe_wavelength: float  # m
  natural_linewidth: float  # rad/s
  quantum_defect: float
  resonant_cross_section: float = field(default=0.0)

  def __post_init__(self) -> None:
    if self.probe_wavelength <= 0:
      raise ValueError(
        f"probe_wavelength must be positive, got {self.probe_wavelength!r}"
      )
    if self.natural_linewidth <= 0:
      raise ValueError(
        f"natural_linewidth must be positive, got {self.natural_linewidth!r}"
      )
    if not 0 <= self.quantum_defect < 4:
      raise ValueError(f"quantum_defect must lie in [0, 4), got {self.quantum_defect!r}")
    if self.resonant_cross_section == 0.0:
      object.__setattr__(
        self, "resonant_cross_section", resonant_cross_section(self.probe_wavelength)
      )
    elif self.resonant_cross_section < 0:
      raise ValueError(
        "resonant_cross_section must be positive, "
        f"got {self.resonant_cross_section!r}"
      )

  def with_defect(self, quantum_defect: float) -> "Species":
    return replace(self, quantum_defect=quantum_defect)


RB85 = Species(
  name="Rb85",
  probe_wavelength=780e-9,
  natural_linewidth=2 * pi * 6.066e6,
  quantum_defect=2.6,
)


def effective_quantum_number(n: int, species: Species) -> float:
  """n* = n - delta."""
  if n <= species.quantum_defect:
    raise ValueError(
      f"n={n} must exceed the quantum defect {species.quantum_defect} of {species.name}"
    )
  return n - species.quantum_defect


def c6_ns_fit(n_star: float, quantum_defect: float = RB85.quantum_defect) -> float:
  """Magnitude of the published Rb nS C6 fit, in rad/s * m^6.

  The fit is written in the integer principal quantum number, which is
  recovered as n = n* + delta.
  """
  if n_star <= 0:
    raise ValueError(f"n_star must be positive, got {n_star!r}")
  n = n_star + quantum_defect
  c0, c1, c2 = NS_C6_FIT_COEFFS
  return abs(n**11 * (c0 + c1 * n + c2 * n**2)) * C6_ATOMIC_UNIT


# reference point for the pure power-law mode
DEFAULT_N_STAR_REF = 68 - RB85.quantum_defect
DEFAULT_C6_REF = c6_ns_fit(DEFAULT_N_STAR_REF)


def c6_coefficient(
  n_star: float,
  mode: C6Mode = "ns_fit",
  quantum_defect: float = RB85.quantum_defect,
  c6_ref: float = DEFAULT_C6_REF,
  n_star_ref: float = DEFAULT_N_STAR_REF,
) -> float:
  """C6(n*) in rad/s * m^6, strictly increasing in n*.

  Args:
      n_star: Effective quantum number.
      mode: "ns_fit" for the published nS parametrization, "power_law" for
        c6_ref * (n*/n*_ref)^11.
      quantum_defect: Defect used to recover n in "ns_fit" mode.
      c6_ref: Reference C6 for "power_law" mode.
      n_star_ref: Reference effective quantum number for "power_law" mode.
  """
  if n_star <= 0:
    raise ValueError(f"n_star must be positive, got {n_star!r}")
  if mode == "ns_fit":
    return c6_ns_fit(n_star, quantum_defect)
  if mode == "power_law":
    if c6_ref <= 0 or n_star_ref <= 0:
      raise ValueError("power-law C6 reference must be positive")
    return c6_ref * (n_star / n_star_ref) ** 11
  raise ValueError(f"Unknown C6 mode: {mode}")


def c6_to_ghz_um6(c6: float) -> float:
  """rad/s * m^6 -> C6/2pi in GHz um^6 (the usual lab unit)."""
  return c6 / (2 * pi) / 1e9 * 1e36


def c6_from_ghz_um6(value: float) -> float:
  return value * 2 * pi * 1e9 * 1e-36


@dataclass(frozen=True)
class RydbergState:
  """An nS Rydberg level with its van der Waals coefficient."""

  n: int
  n_star: float
  C6: float  # rad/s * m^6; V(r) = -hbar C6 / r^6

  def __post_init__(self) -> None:
    if self.C6 <= 0:
      raise ValueError(f"C6 must be positive for nS states, got {self.C6!r}")
    if self.n_star <= 0 or self.n_star > self.n:
      raise ValueError(f"n_star={self.n_star!r} inconsistent with n={self.n}")


def rydberg_state(
  n: int,
  species: Species = RB85,
  c6_mode: C6Mode = "ns_fit",
  c6_ref: float = DEFAULT_C6_REF,
  n_star_ref: float = DEFAULT_N_STAR_REF,
  min_n: int = DEFAULT_MIN_N,
) -> RydbergState:
  """Build the nS state of `species`, guarding the model's validity range."""
  if n < min_n:
    raise ValueError(f"n={n} is below the model validity guard n >= {min_n}")
  n_star = effective_quantum_number(n, species)
  c6 = c6_coefficient(
    n_star,
    mode=c6_mode,
    quantum_defect=species.quantum_defect,
    c6_ref=c6_ref,
    n_star_ref=n_star_ref,
  )
  return RydbergState(n=n, n_star=n_star, C6=c6)
