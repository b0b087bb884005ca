from dataclasses import replace
from math import exp, pi

import numpy as np
import pytest

from src.core.eit import (
  MediumParams,
  beam_area,
  calibrate_gamma_rel,
  dephasing_for_contrast,
  detuning_grid,
  eit_window,
  feature_grid,
  group_delay,
  group_delay_analytic,
  phi_pkpk,
  photons_in_medium,
  power_from_rabi_squared,
  rabi_frequency_squared,
  spectrum,
  transparency_on_resonance,
)

MHZ = 2 * pi * 1e6


def test_beam_area_conventions() -> None:
  assert beam_area(20e-6) == pytest.approx(pi * 4e-10)
  assert beam_area(20e-6, "half") == pytest.approx(pi * 2e-10)
  with pytest.raises(ValueError):
    beam_area(0.0)


def test_medium_validation(medium: MediumParams) -> None:
  assert medium.od == pytest.approx(4.357, rel=1e-3)
  with pytest.raises(ValueError):
    replace(medium, density=0.0)
  with pytest.raises(ValueError):
    replace(medium, gamma_rel=-1.0)


def test_from_od_round_trips_optical_depth(medium: MediumParams) -> None:
  m = MediumParams.from_od(1.7, medium.length, medium.probe_waist, medium.omega_c)
  assert m.od == pytest.approx(1.7, rel=1e-12)
  assert medium.with_od(2.5).od == pytest.approx(2.5, rel=1e-12)


def test_eit_window() -> None:
  assert eit_window(2.0, 1.0) == 2.0
  with pytest.raises(ValueError):
    eit_window(0.0, 1.0)


def test_transmission_bounded_and_symmetric(medium: MediumParams) -> None:
  m = replace(medium, gamma_rel=0.3 * MHZ)
  s = spectrum(m, detuning_grid(m.gamma, 4.0, 2001))
  assert np.all((s.transmission >= 0) & (s.transmission <= 1))
  np.testing.assert_allclose(s.transmission, s.transmission[::-1], atol=1e-12)
  np.testing.assert_allclose(s.phase, -s.phase[::-1], atol=1e-12)


def test_coupling_off_is_beer_lambert(medium: MediumParams) -> None:
  m = medium.coupling_off()
  s = spectrum(m, detuning_grid(m.gamma, 4.0, 801))
  assert s.transmission.min() == pytest.approx(exp(-m.od), rel=1e-9)
  assert phi_pkpk(s) == 0.0


def test_ideal_eit_is_transparent(medium: MediumParams) -> None:
  assert transparency_on_resonance(medium) == pytest.approx(1.0)
  s = spectrum(medium, feature_grid(medium))
  assert phi_pkpk(s) == pytest.approx(medium.od / 2, rel=1e-3)


def test_phi_pkpk_vanishes_with_strong_dephasing(medium: MediumParams) -> None:
  ideal = phi_pkpk(spectrum(medium, feature_grid(medium)))
  washed = replace(medium, gamma_rel=100 * medium.gamma)
  assert phi_pkpk(spectrum(washed, feature_grid(washed))) < 0.05 * ideal


def test_spectrum_grid_must_cover_line(medium: MediumParams) -> None:
  with pytest.raises(ValueError, match="span"):
    spectrum(medium, detuning_grid(medium.gamma, 2.0, 101))
  with pytest.raises(ValueError):
    spectrum(medium, [0.0, -1.0, 1.0])


def test_group_delay_matches_analytic(medium: MediumParams) -> None:
  m = replace(medium, gamma_rel=1.0 * MHZ)
  s = spectrum(m, detuning_grid(m.gamma, 4.0, 4001))
  assert group_delay(s) == pytest.approx(group_delay_analytic(m), rel=1e-2)


def test_group_delay_reference_value(medium: MediumParams) -> None:
  m = replace(medium.with_od(2.0), omega_c=5.5 * MHZ, gamma_rel=2.0 * MHZ)
  assert group_delay_analytic(m) == pytest.approx(9.26e-9, rel=1e-3)


def test_calibrate_gamma_rel_hits_target(medium: MediumParams) -> None:
  gamma_rel = calibrate_gamma_rel(medium, 0.6)
  m = replace(medium, gamma_rel=gamma_rel)
  assert transparency_on_resonance(m) == pytest.approx(0.6, rel=1e-9)
  with pytest.raises(ValueError):
    calibrate_gamma_rel(medium, 1e-4)
  with pytest.raises(ValueError):
    calibrate_gamma_rel(medium.coupling_off(), 0.6)


def test_photons_in_medium() -> None:
  assert photons_in_medium(1e-9, 8e-9, 780e-9) == pytest.approx(31.41, rel=1e-3)
  assert photons_in_medium(20e-12, 600e-9, 780e-9) == pytest.approx(47.12, rel=1e-3)
  assert photons_in_medium(0.0, 8e-9, 780e-9) == 0.0
  with pytest.raises(ValueError):
    photons_in_medium(1e-9, 0.0, 780e-9)


def test_rabi_frequency_mapping_inverts(medium: MediumParams) -> None:
  omega_sq = rabi_frequency_squared(1e-9, medium.beam_area)
  assert omega_sq > 0
  assert power_from_rabi_squared(omega_sq, medium.beam_area) == pytest.approx(1e-9)
  assert rabi_frequency_squared(0.0, medium.beam_area) == 0.0


def test_phi_pkpk_scales_with_optical_depth(medium: MediumParams) -> None:
  m = replace(medium, gamma_rel=0.5 * MHZ)
  grid = feature_grid(m)
  single = phi_pkpk(spectrum(m.with_od(1.0), grid))
  double = phi_pkpk(spectrum(m.with_od(2.0), grid))
  assert double == pytest.approx(2 * single, rel=1e-12)


def test_dephasing_for_contrast_hits_fraction(medium: MediumParams) -> None:
  grid = feature_grid(medium)
  ideal = phi_pkpk(spectrum(medium, grid))
  for fraction in (0.9, 0.5, 0.2):
    m = replace(medium, gamma_rel=dephasing_for_contrast(medium, fraction))
    assert phi_pkpk(spectrum(m, grid)) == pytest.approx(fraction * ideal, rel=1e-9)
  assert dephasing_for_contrast(medium, 1.0) == medium.gamma_rel
  with pytest.raises(ValueError):
    dephasing_for_contrast(medium, 0.0)
  with pytest.raises(ValueError):
    dephasing_for_contrast(medium.coupling_off(), 0.5)
