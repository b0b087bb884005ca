from math import log, pi

import pytest

from src.core.atoms import (
  DEFAULT_C6_REF,
  DEFAULT_N_STAR_REF,
  RB85,
  Species,
  c6_coefficient,
  c6_from_ghz_um6,
  c6_ns_fit,
  c6_to_ghz_um6,
  effective_quantum_number,
  resonant_cross_section,
  rydberg_state,
)


def test_effective_quantum_number_subtracts_defect() -> None:
  assert effective_quantum_number(68, RB85) == pytest.approx(65.4)
  with pytest.raises(ValueError):
    effective_quantum_number(2, RB85)


def test_ns_fit_c6_at_68s() -> None:
  assert c6_to_ghz_um6(c6_ns_fit(65.4)) == pytest.approx(624.8, rel=2e-3)


def test_c6_strictly_increasing_over_model_range() -> None:
  values = [c6_coefficient(n - RB85.quantum_defect) for n in range(30, 101)]
  assert all(b > a for a, b in zip(values, values[1:]))


def test_power_law_mode_scales_as_eleventh_power() -> None:
  ref = c6_coefficient(DEFAULT_N_STAR_REF, mode="power_law")
  assert ref == pytest.approx(DEFAULT_C6_REF, rel=1e-12)
  doubled = c6_coefficient(2 * DEFAULT_N_STAR_REF, mode="power_law")
  assert doubled / ref == pytest.approx(2.0**11, rel=1e-12)


def test_unknown_c6_mode() -> None:
  with pytest.raises(ValueError, match="Unknown C6 mode"):
    c6_coefficient(50.0, mode="hydrogenic")  # type: ignore[arg-type]


def test_lab_unit_conversion() -> None:
  assert c6_from_ghz_um6(1.0) == pytest.approx(2 * pi * 1e9 * 1e-36)
  assert c6_to_ghz_um6(c6_from_ghz_um6(624.8)) == pytest.approx(624.8)


def test_rydberg_state_guard() -> None:
  state = rydberg_state(68)
  assert state.n_star == pytest.approx(65.4)
  assert state.C6 == pytest.approx(c6_ns_fit(65.4))
  with pytest.raises(ValueError, match="validity guard"):
    rydberg_state(29)
  assert rydberg_state(29, min_n=20).n == 29


def test_species_validation() -> None:
  assert RB85.resonant_cross_section == pytest.approx(resonant_cross_section(780e-9))
  assert resonant_cross_section(780e-9) == pytest.approx(2.905e-13, rel=1e-3)
  with pytest.raises(ValueError):
    Species("X", probe_wavelength=780e-9, natural_linewidth=1.0, quantum_defect=5.0)
  with pytest.raises(ValueError):
    Species("X", probe_wavelength=-1.0, natural_linewidth=1.0, quantum_defect=1.0)
  assert RB85.with_defect(3.1).quantum_defect == 3.1


def test_ns_fit_c6_grows_near_eleventh_power() -> None:
  slope = log(c6_coefficient(80.0) / c6_coefficient(40.0)) / log(2.0)
  assert 10.5 <= slope <= 11.5
