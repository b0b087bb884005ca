from dataclasses import replace

import numpy as np
import pytest

from src.core.analysis import extract_pulse_phase
from src.core.eit import MediumParams, detuning_grid, spectrum
from src.core.kerr import kerr_inputs, low_power_slope, unblockaded_fraction
from src.core.simulate import (
  NOISELESS_SEM,
  BeatNoteParams,
  CampaignSpec,
  DutyCycle,
  SweepSpec,
  calibrate_efficiency,
  level_conditions,
  run_campaign,
  substream,
  substream_seed,
  synth_beatnote,
  synth_spectrum,
  synth_sweep,
  sweep_truth_matches,
)


def test_substreams_are_keyed() -> None:
  a = substream(7, "shots", 68, 2).normal(size=4)
  b = substream(7, "shots", 68, 2).normal(size=4)
  c = substream(7, "shots", 68, 3).normal(size=4)
  d = substream(8, "shots", 68, 2).normal(size=4)
  np.testing.assert_array_equal(a, b)
  assert not np.array_equal(a, c)
  assert not np.array_equal(a, d)
  with pytest.raises(ValueError, match="Unknown stream"):
    substream_seed(7, "photons")


def test_duty_cycle_defaults() -> None:
  duty = DutyCycle()
  assert duty.cycle_duration == pytest.approx(8.7e-3)
  assert duty.pulse_period == pytest.approx(2.4e-6)
  assert duty.gap == pytest.approx(1.8e-6)
  assert duty.pulse_train == pytest.approx(0.9e-3)


def test_duty_cycle_gap_spacing() -> None:
  assert DutyCycle(pulse_spacing=1.8e-6, spacing="gap").pulse_period == pytest.approx(
    2.4e-6
  )
  # the same number read as a gap no longer fits the measurement window
  with pytest.raises(ValueError, match="remain after spectroscopy"):
    DutyCycle(spacing="gap")
  with pytest.raises(ValueError):
    DutyCycle(pulse_spacing=0.5e-6)
  with pytest.raises(ValueError):
    DutyCycle(pulse_count=0)


def test_beatnote_params_validation() -> None:
  assert BeatNoteParams().samples_per_cycle == 10.0
  with pytest.raises(ValueError, match="4x"):
    BeatNoteParams(sample_rate=300e6)
  with pytest.raises(ValueError):
    BeatNoteParams(guard_fraction=0.5)


def test_beatnote_markers_follow_pulses() -> None:
  rec = synth_beatnote(8e-3, DutyCycle(), BeatNoteParams(), seed=1, pulses=2)
  assert len(rec.samples) == 2 * 2400
  assert rec.markers[0].tolist() == [[90, 810], [960, 1440], [1590, 2310]]
  assert rec.markers[1, 0, 0] == 2400 + 90
  assert rec.true_phase[1000] == 8e-3
  assert rec.true_phase[500] == 0.0
  header = rec.header()
  assert header["n_samples"] == 4800
  assert header["phase_step_rad"] == 8e-3
  with pytest.raises(ValueError, match="duty cycle holds"):
    synth_beatnote(8e-3, DutyCycle(), BeatNoteParams(), seed=1, pulses=376)


def test_noiseless_beatnote_recovers_phase_step() -> None:
  rec = synth_beatnote(8e-3, DutyCycle(), BeatNoteParams(), seed=1, pulses=20)
  result = extract_pulse_phase(rec)
  assert result.n_pulses == 20
  assert result.mean == pytest.approx(8e-3, abs=1e-9)
  assert result.flags == ()


def test_linear_drift_cancels() -> None:
  params = BeatNoteParams(drift_rate=25.0)
  rec = synth_beatnote(-4e-3, DutyCycle(), params, seed=1, pulses=20)
  result = extract_pulse_phase(rec, warn=False)
  assert result.mean == pytest.approx(-4e-3, abs=1e-9)
  assert result.flags == ("drift",)


def test_beatnote_sem_scales_with_pulse_count() -> None:
  params = BeatNoteParams(amplitude_noise=0.2)
  duty = DutyCycle()

  def mean_sem(pulses: int) -> float:
    sems = [
      extract_pulse_phase(
        synth_beatnote(8e-3, duty, params, seed=seed, pulses=pulses), warn=False
      ).sem
      for seed in range(16)
    ]
    return float(np.mean(sems))

  assert mean_sem(40) / mean_sem(160) == pytest.approx(2.0, rel=0.1)


def test_synth_spectrum_noise(medium: MediumParams) -> None:
  grid = detuning_grid(medium.gamma, 4.0, 401)
  clean = spectrum(medium, grid)
  np.testing.assert_array_equal(
    synth_spectrum(medium, grid, 0.0, seed=1).transmission, clean.transmission
  )
  noisy = synth_spectrum(medium, grid, 0.5, seed=1)
  assert noisy.transmission.min() >= 0.0
  assert noisy.transmission.max() <= 1.0
  again = synth_spectrum(medium, grid, 0.5, seed=1)
  np.testing.assert_array_equal(noisy.phase, again.phase)
  with pytest.raises(ValueError):
    synth_spectrum(medium, grid, -0.1, seed=1)


def test_sweep_spec_validation() -> None:
  with pytest.raises(ValueError, match="seed"):
    SweepSpec(seed=-1)
  with pytest.raises(ValueError, match="distinct"):
    SweepSpec(seed=1, levels=(68, 68))
  with pytest.raises(ValueError, match="increasing"):
    SweepSpec(seed=1, signal_powers=(1e-9, 1e-10))
  with pytest.raises(ValueError, match="od_range"):
    SweepSpec(seed=1, od_range=(2.0, 1.0))


def test_level_conditions_stay_in_range() -> None:
  spec = SweepSpec(seed=4)
  for level in spec.levels:
    c = level_conditions(spec, level)
    assert 1.0 <= c.od <= 2.0
    assert 0.9 <= c.power_factor <= 1.1
    assert c.phi_pkpk > 0
  assert level_conditions(spec, 68) == level_conditions(spec, 68)


def test_sweep_is_reproducible_across_workers() -> None:
  spec = SweepSpec(
    seed=3, levels=(58, 68), signal_powers=(1e-10, 5e-10, 1e-9), phase_noise=0.002
  )
  serial = synth_sweep(spec, workers=1, warn=False)
  threaded = synth_sweep(spec, workers=4, warn=False)
  assert len(serial.rows) == 6
  assert [r.level for r in serial.rows] == [58, 58, 58, 68, 68, 68]
  assert serial.rows == threaded.rows
  assert serial.truth == threaded.truth
  assert sweep_truth_matches(spec, serial.truth)
  assert all(r.sem == pytest.approx(0.002 / np.sqrt(375)) for r in serial.rows)
  assert serial.rows != synth_sweep(replace(spec, seed=4), warn=False).rows


@pytest.mark.parametrize("saturate", [False, True])
def test_tampered_truth_is_detected(saturate: bool) -> None:
  spec = SweepSpec(
    seed=3, levels=(58, 68), signal_powers=(1e-10, 1e-9, 5e-9), saturate=saturate
  )
  truth = synth_sweep(spec, warn=False).truth
  assert sweep_truth_matches(spec, truth)
  bad = [replace(truth[0], true_phase=truth[0].true_phase * 1.01), *truth[1:]]
  assert not sweep_truth_matches(spec, bad)
  # a truth written without the probe load
  unloaded = replace(spec, probe_power=0.0)
  assert sweep_truth_matches(spec, synth_sweep(unloaded, warn=False).truth) != saturate


def test_noiseless_sweep_reports_truth() -> None:
  spec = SweepSpec(seed=2, levels=(62,), signal_powers=(1e-10, 1e-9))
  result = synth_sweep(spec, warn=False)
  for row, truth in zip(result.rows, result.truth):
    assert row.sem == NOISELESS_SEM
    assert row.phase == truth.true_phase
    assert row.signal_power == truth.signal_power


def test_calibrated_efficiency_pins_slope() -> None:
  spec = calibrate_efficiency(
    SweepSpec(
      seed=1,
      levels=(68,),
      signal_powers=(1e-11, 2e-11, 5e-11),
      od_range=(1.5, 1.5),
      power_drift=0.0,
      saturate=False,
    )
  )
  k = kerr_inputs(spec.medium.with_od(1.5), spec.state(68), 0.0, spec.probe_power)
  assert spec.efficiency * low_power_slope(k) == pytest.approx(-8e6, rel=1e-12)
  for row in synth_sweep(spec, warn=False).rows:
    assert row.phase / row.signal_power == pytest.approx(-8e6, rel=1e-9)
  with pytest.raises(ValueError):
    calibrate_efficiency(spec, target_slope=0.0)


def test_saturation_bends_the_sweep(capsys: pytest.CaptureFixture[str]) -> None:
  spec = SweepSpec(
    seed=1, levels=(68,), od_range=(1.5, 1.5), power_drift=0.0, saturate=True
  )
  result = synth_sweep(spec)
  secant = np.array([abs(r.phase) / r.signal_power for r in result.rows])
  assert np.all(np.diff(secant) < 0)

  k = kerr_inputs(spec.medium.with_od(1.5), spec.state(68), 0.0, spec.probe_power)
  expected = abs(low_power_slope(k, saturate=True))
  for row, slope in zip(result.rows, secant):
    if row.signal_power <= 2e-11:
      assert slope == pytest.approx(expected, rel=0.05)

  assert result.flags == ("validity",)
  assert "low-density model" in capsys.readouterr().err


def test_campaign_beatnotes_carry_sweep_phase() -> None:
  campaign = CampaignSpec(
    sweep=SweepSpec(seed=5, levels=(58, 68), signal_powers=(1e-10, 1e-9)),
    beatnote_pulses=3,
    spectrum_points=201,
  )
  result = run_campaign(campaign, warn=False)
  assert sorted(result.spectra) == [58, 68]
  for level, rec in result.beatnotes.items():
    assert len(result.spectra[level].detunings) == 201
    assert rec.level == level
    assert rec.phase_step < 0
    extracted = extract_pulse_phase(rec, warn=False)
    assert extracted.mean == pytest.approx(rec.phase_step, abs=1e-9)


def test_probe_load_lowers_phi_pkpk_by_unblockaded_fraction() -> None:
  spec = SweepSpec(seed=6, levels=(58, 68), saturate=True)
  plain = replace(spec, saturate=False)
  for level in spec.levels:
    loaded = level_conditions(spec, level)
    bare = level_conditions(plain, level)
    assert loaded.od == bare.od
    assert bare.gamma_rel == 0.0
    assert loaded.gamma_rel > 0
    k = kerr_inputs(spec.medium.with_od(loaded.od), spec.state(level), 0.0, 1e-9)
    assert loaded.phi_pkpk / bare.phi_pkpk == pytest.approx(
      unblockaded_fraction(k), rel=1e-6
    )


def test_shot_noise_matches_reported_sd() -> None:
  spec = SweepSpec(
    seed=12,
    levels=(68,),
    signal_powers=tuple(float(p) for p in np.geomspace(1e-12, 2e-9, 10_000)),
    shots_per_point=1,
    phase_noise=0.01,
    power_drift=0.0,
  )
  result = synth_sweep(spec, warn=False)
  residuals = np.array(
    [r.phase - t.true_phase for r, t in zip(result.rows, result.truth)]
  )
  assert all(r.sem == 0.01 for r in result.rows)
  assert abs(residuals.mean()) < 5 * 0.01 / 100
  assert np.std(residuals, ddof=1) == pytest.approx(0.01, rel=0.1)
