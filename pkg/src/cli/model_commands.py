"""Model commands: EIT spectra, cross-phase curves and unit conversions."""

import json
from dataclasses import replace

import click

from ..config import MHZ, NW, ConfigError
from ..core.atoms import c6_to_ghz_um6
from ..core.eit import (
  calibrate_gamma_rel,
  detuning_grid,
  group_delay,
  group_delay_analytic,
  photons_in_medium,
  phi_pkpk,
  spectrum as eit_spectrum,
  transparency_on_resonance,
)
from ..core.kerr import (
  MC_MIN_SAMPLES,
  REFERENCE_NONLINEARITIES,
  chi3_from_slope,
  compare_methods,
  half_saturation_power,
  kerr_index_from_slope,
  kerr_inputs,
  low_power_slope,
  per_photon_phase,
)
from ..core.simulate import substream_seed, synth_spectrum
from ..output.files import write_csv, write_json, write_spectrum_csv
from ..output.formatters import (
  display_conversions,
  display_reference_table,
  display_saved,
  display_spectrum_summary,
  display_xphase_table,
)
from ..types.rydberg import MonteCarloSampler
from .common import (
  add_options,
  bad_parameter,
  handle_command_errors,
  load_context_config,
  make_provenance,
  output_options,
  parse_float_list,
  resolve_output_dir,
)

XPHASE_COLUMNS = (
  "signal_power_w",
  "closed_rad",
  "quadrature_rad",
  "quadrature_rel_diff",
  "mc_mean_rad",
  "mc_stderr_rad",
  "mc_z",
  "full_rad",
  "saturated_rad",
  "model_rad",
  "slope_rad_per_w",
  "chi3_m2V2",
  "per_photon_phase_rad",
  "validity_ratio",
)

EXPERIMENT_DEFAULTS = {
  "slope": 8.0,  # mrad/nW
  "waist": 20.0,  # um
  "length": 0.5,  # mm
  "wavelength": 780.0,  # nm
  "group_delay": 8.0,  # ns
  "power": 1.0,  # nW
  "dwell": 8.0,  # ns
}


@click.command()
@click.option("--n", "level", type=int, default=68, show_default=True, help="Rydberg level nS")
@click.option("--noise", type=float, help="Also write a noisy copy with this T/phase noise")
@click.option("--coupling-off", is_flag=True, help="Switch the coupling beam off")
@click.option("--gamma-rel", type=float, help="Rydberg dephasing rate gamma_rel/2pi in MHz")
@click.option(
  "--transparency",
  type=float,
  help="Calibrate gamma_rel to this on-resonance transmission",
)
@click.option("--span", type=float, help="Half-width of the detuning grid in units of Gamma")
@click.option("--points", type=int, help="Number of detuning points")
@click.option("--seed", type=int, help="Seed for the noisy copy")
@add_options(output_options)
@click.pass_context
@handle_command_errors
def spectrum(
  ctx: click.Context,
  level: int,
  noise: float | None,
  coupling_off: bool,
  gamma_rel: float | None,
  transparency: float | None,
  span: float | None,
  points: int | None,
  seed: int | None,
  output_dir: str | None,
) -> None:
  """Write the probe transmission and phase spectrum of one Rydberg level."""
  if gamma_rel is not None and transparency is not None:
    raise click.UsageError("--gamma-rel and --transparency are mutually exclusive")
  config = load_context_config(ctx)
  with bad_parameter("--n"):
    state = config.state(level)
  medium = config.medium
  if gamma_rel is not None:
    with bad_parameter("--gamma-rel"):
      medium = replace(medium, gamma_rel=gamma_rel * MHZ)
  if coupling_off:
    medium = medium.coupling_off()
  if transparency is not None:
    with bad_parameter("--transparency"):
      medium = replace(medium, gamma_rel=calibrate_gamma_rel(medium, transparency))

  settings = config.section("spectrum")
  span = settings["span_gamma"] if span is None else span
  # the grid must cover the whole EIT feature for phi_pkpk
  span = max(span, 1.5 * medium.omega_c / medium.gamma)
  click.echo(f"📥 {click.style(f'Computing spectrum for n = {level}...', fg='cyan')}")
  with bad_parameter("--span/--points"):
    grid = detuning_grid(
      medium.gamma, span=span, points=settings["points"] if points is None else points
    )
    s = eit_spectrum(medium, grid)
  pkpk = phi_pkpk(s)
  t0 = transparency_on_resonance(medium)
  try:
    tau_g: float | None = group_delay(s)
  except ValueError:
    click.echo(
      f"⚠️  {click.style('Grid too coarse near resonance for a group delay.', fg='yellow')}",
      err=True,
    )
    tau_g = None
  tau_analytic = group_delay_analytic(medium) if medium.delta_c == 0 else None

  noisy = None
  if noise:
    seed = config.seed if seed is None else seed
    if seed is None:
      raise ConfigError("a seed is required for --noise: pass --seed or set `seed`")
    with bad_parameter("--noise"):
      noisy = synth_spectrum(
        medium, grid, noise, substream_seed(seed, "spectrum", level)
      )

  display_spectrum_summary(s, level, pkpk, t0, tau_g, tau_analytic)

  directory = resolve_output_dir(config, output_dir)
  prov = make_provenance(ctx, config)
  stem = f"spectrum_n{level}"
  params = {
    "level": level,
    "n_star": state.n_star,
    "c6_ghz_um6": c6_to_ghz_um6(state.C6),
    "medium": medium.as_json(),
    "phi_pkpk_rad": pkpk,
    "transparency": t0,
    "group_delay_s": tau_g,
    "group_delay_analytic_s": tau_analytic,
    "noise": noise or 0.0,
    "seed": seed if noisy is not None else None,
  }
  saved = [
    write_spectrum_csv(directory / f"{stem}.csv", s, prov),
    write_json(directory / f"{stem}.json", params, prov),
  ]
  if noisy is not None:
    saved.append(write_spectrum_csv(directory / f"{stem}_noisy.csv", noisy, prov))
  display_saved(saved)


@click.command()
@click.option("--n", "level", type=int, default=68, show_default=True, help="Rydberg level nS")
@click.option(
  "--powers",
  help="Comma-separated signal powers in nW (default: the configured sweep powers)",
)
@click.option("--probe-power", type=float, help="Probe power in nW (default: config)")
@click.option("--od", type=float, help="Optical depth (default: medium, or calibration OD)")
@click.option(
  "--mc-samples",
  type=int,
  default=0,
  show_default=True,
  help="Monte-Carlo pairs per power (0 disables)",
)
@click.option(
  "--mc-sampler",
  type=click.Choice(["volume", "radial"]),
  default="volume",
  show_default=True,
  help="Ground atoms uniform in the cloud, or importance-sampled in distance",
)
@click.option("--calibrated", is_flag=True, help="Apply the configured efficiency")
@click.option(
  "--saturate/--no-saturate",
  default=None,
  help="Model column uses the saturated density (default: config)",
)
@click.option("--seed", type=int, help="Seed for the Monte-Carlo estimate")
@add_options(output_options)
@click.pass_context
@handle_command_errors
def xphase(
  ctx: click.Context,
  level: int,
  powers: str | None,
  probe_power: float | None,
  od: float | None,
  mc_samples: int,
  mc_sampler: MonteCarloSampler,
  calibrated: bool,
  saturate: bool | None,
  seed: int | None,
  output_dir: str | None,
) -> None:
  """Cross-phase against signal power by closed form, quadrature and Monte Carlo."""
  config = load_context_config(ctx)
  seed = config.seed if seed is None else seed
  if mc_samples < 0 or 0 < mc_samples < MC_MIN_SAMPLES:
    raise click.BadParameter(
      f"use 0 (off) or at least {MC_MIN_SAMPLES} samples, got {mc_samples}",
      param_hint="--mc-samples",
    )
  if mc_samples and seed is None:
    raise ConfigError("a seed is required for --mc-samples: pass --seed or set `seed`")
  sweep = config.section("sweep")
  saturate = sweep["saturate"] if saturate is None else saturate
  signal_powers = (
    [p * NW for p in parse_float_list(powers, "--powers")]
    if powers is not None
    else [0.0, *config.signal_powers()]
  )
  if not signal_powers:
    raise click.BadParameter("no signal powers given", param_hint="--powers")
  probe = (sweep["probe_power_nw"] if probe_power is None else probe_power) * NW

  with bad_parameter("--n"):
    state = config.state(level)
  medium = config.medium
  efficiency = 1.0
  if calibrated:
    # calibration does not depend on the seed
    spec = config.sweep_spec(seed=seed or 0, saturate=saturate)
    efficiency = spec.efficiency
    if od is None:
      od = sum(spec.od_range) / 2.0
  if od is not None:
    with bad_parameter("--od"):
      medium = medium.with_od(od)

  message = f"Evaluating cross-phase for n = {level} at {len(signal_powers)} powers..."
  click.echo(f"📥 {click.style(message, fg='cyan')}")
  with bad_parameter("--powers/--probe-power"):
    inputs = [kerr_inputs(medium, state, p, probe) for p in signal_powers]
  rows = [
    compare_methods(
      k,
      mc_samples=mc_samples,
      seed=seed or 0,
      workers=sweep["workers"],
      sampler=mc_sampler,
    )
    for k in inputs
  ]
  display_xphase_table(rows, level)

  table = []
  for row in rows:
    chosen = row.saturated if saturate else row.full
    model = efficiency * chosen.phase
    mc = row.montecarlo
    table.append(
      (
        row.signal_power,
        row.closed,
        row.quadrature,
        row.quadrature_rel_diff,
        mc.mean if mc else None,
        mc.stderr if mc else None,
        row.montecarlo_z,
        row.full.phase,
        row.saturated.phase,
        model,
        model / row.signal_power if row.signal_power else None,
        efficiency * chosen.chi3 if chosen.chi3 is not None else None,
        efficiency * chosen.per_photon_phase
        if chosen.per_photon_phase is not None
        else None,
        chosen.validity_ratio,
      )
    )

  k0 = kerr_inputs(medium, state, 0.0, probe)
  summary = {
    "level": level,
    "n_star": state.n_star,
    "c6_ghz_um6": c6_to_ghz_um6(state.C6),
    "od": medium.od,
    "r_b_m": k0.r_b,
    "blockade_volume_m3": k0.blockade_volume,
    "probe_power_w": probe,
    "saturate": saturate,
    "efficiency": efficiency,
    "low_power_slope_rad_per_w": efficiency * low_power_slope(k0, saturate=saturate),
    "half_saturation_power_w": half_saturation_power(k0),
    "max_quadrature_rel_diff": max(r.quadrature_rel_diff for r in rows),
    "mc_samples": mc_samples,
    "mc_sampler": mc_sampler if mc_samples else None,
    "seed": seed if mc_samples else None,
  }
  directory = resolve_output_dir(config, output_dir)
  prov = make_provenance(ctx, config)
  display_saved(
    [
      write_csv(directory / f"xphase_n{level}.csv", XPHASE_COLUMNS, table, prov),
      write_json(directory / f"xphase_n{level}.json", summary, prov),
    ]
  )


@click.command()
@click.option("--slope", type=float, help="Cross-phase slope in mrad/nW")
@click.option("--waist", type=float, help="Probe waist in um")
@click.option("--length", type=float, help="Medium length in mm")
@click.option("--wavelength", type=float, help="Probe wavelength in nm (default: config)")
@click.option("--group-delay", type=float, help="Group delay in ns, for the per-photon phase")
@click.option("--power", type=float, help="Signal power in nW, for the photon number")
@click.option("--dwell", type=float, help="Dwell time in ns (default: the group delay)")
@click.option(
  "--area-convention",
  type=click.Choice(["full", "half"], case_sensitive=False),
  default="full",
  show_default=True,
  help="Beam area pi w^2 (full) or pi w^2 / 2 (half)",
)
@click.option("--experiment-defaults", is_flag=True, help="Fill unset flags with the experiment's values")
@click.option("--table", is_flag=True, help="Print the table of reported nonlinearities")
@click.option(
  "--format",
  "-f",
  type=click.Choice(["json", "text"], case_sensitive=False),
  default="json",
  help="Output format (json or text)",
)
@click.pass_context
@handle_command_errors
def convert(
  ctx: click.Context,
  slope: float | None,
  waist: float | None,
  length: float | None,
  wavelength: float | None,
  group_delay: float | None,
  power: float | None,
  dwell: float | None,
  area_convention: str,
  experiment_defaults: bool,
  table: bool,
  format: str,
) -> None:
  """Convert a cross-phase slope to n2, chi(3), per-photon phase and photon number."""
  if table:
    display_reference_table(REFERENCE_NONLINEARITIES)
    if slope is None and not experiment_defaults:
      return

  given = {
    "slope": slope,
    "waist": waist,
    "length": length,
    "wavelength": wavelength,
    "group_delay": group_delay,
    "power": power,
    "dwell": dwell,
  }
  if experiment_defaults:
    given = {k: EXPERIMENT_DEFAULTS[k] if v is None else v for k, v in given.items()}
  missing = [f"--{k}" for k in ("slope", "waist", "length") if given[k] is None]
  if missing:
    raise click.UsageError(f"missing {', '.join(missing)} (or pass --experiment-defaults)")

  config = load_context_config(ctx)
  wavelength_m = (
    config.species.probe_wavelength
    if given["wavelength"] is None
    else given["wavelength"] * 1e-9
  )
  slope_si = given["slope"] * 1e-3 / NW
  waist_m = given["waist"] * 1e-6
  length_m = given["length"] * 1e-3
  tau_g = None if given["group_delay"] is None else given["group_delay"] * 1e-9
  dwell_s = tau_g if given["dwell"] is None else given["dwell"] * 1e-9

  with bad_parameter("--slope/--waist/--length/--group-delay/--power/--dwell"):
    values: dict[str, float | None] = {
      "slope_rad_per_w": slope_si,
      "n2_m2_per_w": kerr_index_from_slope(
        slope_si, waist_m, length_m, wavelength_m, area_convention
      ),
      "chi3_m2_per_v2": chi3_from_slope(
        slope_si, waist_m, length_m, wavelength_m, area_convention
      ),
      "per_photon_phase_rad": None
      if tau_g is None
      else per_photon_phase(slope_si, tau_g, wavelength_m),
      "photons_in_medium": None
      if given["power"] is None or dwell_s is None
      else photons_in_medium(given["power"] * NW, dwell_s, wavelength_m),
    }
  if format == "text":
    display_conversions(values)
    return
  click.echo(json.dumps({**values, "provenance": make_provenance(ctx, config)}, indent=2))
