import itertools
from dataclasses import replace
from math import inf, pi

import pytest

from src.core.atoms import RydbergState, rydberg_state
from src.core.eit import MediumParams
from src.core.kerr import (
  CORE_INTEGRAL,
  chi3_from_slope,
  compare_methods,
  cross_phase_closed,
  cross_phase_full,
  cross_phase_montecarlo,
  cross_phase_quadrature,
  cross_phase_saturated,
  half_saturation_power,
  kerr_index_from_slope,
  kerr_inputs,
  low_power_slope,
  per_atom_phase,
  per_photon_phase,
  rydberg_density,
  shell_fraction,
  shell_integral,
)

MHZ = 2 * pi * 1e6


def test_shell_integral_matches_closed_form() -> None:
  assert shell_integral() == pytest.approx(CORE_INTEGRAL, rel=1e-10)
  assert CORE_INTEGRAL == pytest.approx(0.3702402, rel=1e-6)
  assert shell_integral(0.0, 2.0) + shell_integral(2.0) == pytest.approx(
    CORE_INTEGRAL, rel=1e-10
  )
  with pytest.raises(ValueError):
    shell_integral(2.0, 1.0)


def test_most_phase_comes_from_shell_around_blockade_radius() -> None:
  assert shell_fraction(0.5, 2.0) == pytest.approx(0.886880, rel=1e-5)
  assert shell_fraction(0.0, inf) == pytest.approx(1.0)


def test_blockade_radius_reference(medium: MediumParams, state68: RydbergState) -> None:
  k = kerr_inputs(replace(medium, omega_c=5.5 * MHZ), state68)
  assert k.r_b == pytest.approx(7.94e-6, rel=2e-3)


def test_inputs_reject_negative_power(
  medium: MediumParams, state68: RydbergState
) -> None:
  with pytest.raises(ValueError):
    kerr_inputs(medium, state68, signal_power=-1e-9)
  k = kerr_inputs(medium, state68)
  with pytest.raises(ValueError, match="inconsistent"):
    replace(k, delta_eit=2 * k.delta_eit)


def test_per_atom_phase_peaks_at_blockade_radius(
  medium: MediumParams, state68: RydbergState
) -> None:
  k = kerr_inputs(medium, state68, 1e-9)
  peak = -(medium.cross_section / medium.beam_area) / 2
  assert per_atom_phase(k.r_b, k) == pytest.approx(peak, rel=1e-12)
  inside, outside = per_atom_phase([0.2 * k.r_b, 5 * k.r_b], k)
  assert abs(inside) < 1e-3 * abs(peak)
  assert abs(outside) < 1e-3 * abs(peak)
  with pytest.raises(ValueError):
    per_atom_phase(0.0, k)


@pytest.mark.parametrize("n", [50, 58, 68, 70])
@pytest.mark.parametrize("power", [1e-11, 1e-10, 1e-9, 5e-9])
def test_closed_form_agrees_with_quadrature(
  medium: MediumParams, n: int, power: float
) -> None:
  result = compare_methods(kerr_inputs(medium, rydberg_state(n), power), warn=False)
  assert result.closed < 0
  assert result.quadrature_rel_diff < 1e-6
  assert result.full.phase == pytest.approx(result.closed, rel=1e-12)


def test_quadrature_matches_closed_form_over_od_and_density(
  medium: MediumParams, state68: RydbergState
) -> None:
  ods = [0.5 * i for i in range(1, 11)]
  powers = [10.0 ** (-12 + 4 * j / 9) for j in range(10)]
  for od, power in itertools.product(ods, powers):
    k = kerr_inputs(medium.with_od(od), state68, power)
    m = k.medium
    rho_ryd = rydberg_density(m.density, m.omega_s, m.omega_c)
    closed = cross_phase_closed(od, k.r_b, rho_ryd)
    assert cross_phase_quadrature(k) == pytest.approx(closed, rel=1e-6)


def test_power_law_mode_scales_phase(medium: MediumParams) -> None:
  low = rydberg_state(50, c6_mode="power_law")
  high = rydberg_state(70, c6_mode="power_law")
  phase_low = cross_phase_full(kerr_inputs(medium, low, 1e-9), warn=False).phase
  phase_high = cross_phase_full(kerr_inputs(medium, high, 1e-9), warn=False).phase
  expected = (high.n_star / low.n_star) ** 5.5
  assert phase_high / phase_low == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("sampler", ["volume", "radial"])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_montecarlo_is_unbiased(
  medium: MediumParams, state68: RydbergState, seed: int, sampler: str
) -> None:
  k = kerr_inputs(medium, state68, 1e-9)
  estimate = cross_phase_montecarlo(k, 100_000, seed, sampler=sampler)
  closed = cross_phase_quadrature(k)
  assert estimate.n_samples == 100_000
  assert estimate.stderr > 0
  assert abs(estimate.mean - closed) / estimate.stderr < 3.5


def test_volume_montecarlo_covers_closed_form(medium: MediumParams) -> None:
  z_scores = []
  for seed, (n, power) in enumerate(
    itertools.product([50, 58, 65, 68], [1e-13, 2e-13, 4e-13, 7e-13, 1e-12])
  ):
    k = kerr_inputs(medium, rydberg_state(n), power)
    rho_ryd = rydberg_density(medium.density, k.medium.omega_s, medium.omega_c)
    assert rho_ryd * k.blockade_volume <= 0.01
    estimate = cross_phase_montecarlo(k, 500_000, 100 + seed)
    closed = cross_phase_closed(medium.od, k.r_b, rho_ryd)
    z_scores.append(abs(estimate.mean - closed) / estimate.stderr)
  assert len(z_scores) == 20
  assert sum(z < 3 for z in z_scores) >= 19
  assert max(z_scores) < 4


def test_montecarlo_samplers_agree_inside_column(
  medium: MediumParams, state68: RydbergState
) -> None:
  k = kerr_inputs(medium, state68, 1e-9)
  volume = cross_phase_montecarlo(k, 200_000, 5, clip_to_column=True)
  radial = cross_phase_montecarlo(k, 200_000, 6, clip_to_column=True, sampler="radial")
  spread = (volume.stderr**2 + radial.stderr**2) ** 0.5
  assert abs(volume.mean - radial.mean) < 4 * spread
  assert abs(volume.mean) < abs(cross_phase_quadrature(k))


def test_montecarlo_independent_of_workers(
  medium: MediumParams, state68: RydbergState
) -> None:
  k = kerr_inputs(medium, state68, 5e-10)
  serial = cross_phase_montecarlo(k, 100_000, 9, workers=1)
  threaded = cross_phase_montecarlo(k, 100_000, 9, workers=4)
  assert serial == threaded
  assert cross_phase_montecarlo(k, 100_000, 10) != serial
  assert cross_phase_montecarlo(k, 100_000, 9, sampler="radial") != serial


def test_montecarlo_edge_correction_reduces_phase(
  medium: MediumParams, state68: RydbergState
) -> None:
  k = kerr_inputs(medium, state68, 1e-9)
  bulk = cross_phase_montecarlo(k, 50_000, 4, sampler="radial")
  clipped = cross_phase_montecarlo(k, 50_000, 4, clip_to_column=True, sampler="radial")
  assert abs(clipped.mean) < abs(bulk.mean)


def test_montecarlo_guards(medium: MediumParams, state68: RydbergState) -> None:
  k = kerr_inputs(medium, state68, 1e-9)
  with pytest.raises(ValueError, match="at least"):
    cross_phase_montecarlo(k, 999, 1)
  with pytest.raises(ValueError, match="sampler"):
    cross_phase_montecarlo(k, 1000, 1, sampler="grid")  # type: ignore[arg-type]
  dark = cross_phase_montecarlo(kerr_inputs(medium, state68), 1000, 1)
  assert dark.mean == 0.0
  assert dark.stderr == 0.0


def test_zero_signal_power_gives_zero_phase(
  medium: MediumParams, state68: RydbergState
) -> None:
  result = compare_methods(kerr_inputs(medium, state68, 0.0), mc_samples=1000, seed=1)
  assert result.closed == 0.0
  assert result.quadrature == 0.0
  assert result.full.phase == 0.0
  assert result.saturated.phase == 0.0
  assert result.full.chi3 is None
  assert result.full.flags == ()
  assert result.montecarlo_z == 0.0
  assert result.quadrature_rel_diff == 0.0


def test_validity_flag(medium: MediumParams, state68: RydbergState) -> None:
  weak = cross_phase_full(kerr_inputs(medium, state68, 1e-11), warn=False)
  strong = cross_phase_full(kerr_inputs(medium, state68, 1e-9), warn=False)
  assert weak.flags == ()
  assert weak.validity_ratio < 0.1
  assert strong.flags == ("validity",)


def test_validity_warning_goes_to_stderr(
  medium: MediumParams, state68: RydbergState, capsys: pytest.CaptureFixture[str]
) -> None:
  cross_phase_full(kerr_inputs(medium, state68, 1e-9))
  captured = capsys.readouterr()
  assert "low-density model" in captured.err
  assert captured.out == ""


def test_half_saturation_power(medium: MediumParams, state68: RydbergState) -> None:
  k = kerr_inputs(medium, state68)
  p_half = half_saturation_power(k)
  assert 1e-9 < p_half < 10e-9
  assert p_half == pytest.approx(1.131e-9, rel=1e-2)
  at_half = cross_phase_saturated(k.with_signal_power(p_half), warn=False)
  total = at_half.rydberg_density  # no probe: signal share is the whole density
  assert total * at_half.blockade_volume == pytest.approx(0.5, rel=1e-9)


def test_saturation_only_reduces_phase(
  medium: MediumParams, state68: RydbergState
) -> None:
  for power in (1e-11, 1e-10, 1e-9, 1e-8):
    k = kerr_inputs(medium, state68, power, probe_power=1e-9)
    linear = cross_phase_full(k, warn=False).phase
    saturated = cross_phase_saturated(k, warn=False).phase
    assert linear < saturated < 0


def test_low_power_slope(medium: MediumParams, state68: RydbergState) -> None:
  k = kerr_inputs(medium, state68, 3e-10, probe_power=1e-9)
  linear = cross_phase_full(k, warn=False).phase / k.signal_power
  assert low_power_slope(k) == pytest.approx(linear, rel=1e-12)
  assert 0 > low_power_slope(k, saturate=True) > low_power_slope(k)
  dark_probe = kerr_inputs(medium, state68, 3e-10)
  assert low_power_slope(dark_probe, saturate=True) == pytest.approx(
    low_power_slope(dark_probe), rel=1e-12
  )


def test_closed_form_rejects_bad_inputs() -> None:
  with pytest.raises(ValueError):
    cross_phase_closed(1.0, 0.0, 1e15)
  with pytest.raises(ValueError):
    cross_phase_closed(1.0, 1e-5, -1.0)


def test_slope_conversions() -> None:
  slope = 8e-3 / 1e-9
  assert chi3_from_slope(slope, 20e-6, 0.5e-3, 780e-9) == pytest.approx(
    8.834e-9, rel=1e-3
  )
  assert kerr_index_from_slope(slope, 20e-6, 0.5e-3, 780e-9, "half") == pytest.approx(
    kerr_index_from_slope(slope, 20e-6, 0.5e-3, 780e-9) / 2
  )
  assert per_photon_phase(slope, 8e-9, 780e-9) == pytest.approx(254.7e-6, rel=1e-3)
  assert chi3_from_slope(0.0, 20e-6, 0.5e-3, 780e-9) == 0.0
  with pytest.raises(ValueError):
    per_photon_phase(slope, 0.0, 780e-9)
  with pytest.raises(ValueError):
    kerr_index_from_slope(slope, 20e-6, 0.0, 780e-9)


def test_result_carries_conversions(
  medium: MediumParams, state68: RydbergState
) -> None:
  result = cross_phase_full(kerr_inputs(medium, state68, 1e-10), warn=False)
  assert result.chi3 is not None and result.chi3 < 0
  assert result.per_photon_phase is not None and result.per_photon_phase < 0
  payload = result.as_json()
  assert payload["phase_rad"] == result.phase
  assert payload["validity_ratio"] == pytest.approx(result.validity_ratio)
