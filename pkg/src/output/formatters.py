"""Terminal summaries for spectra, cross-phase tables, campaigns and analyses."""

from collections.abc import Sequence
from math import pi
from pathlib import Path

import click

from ..core.analysis import AnalysisReport, FitResult
from ..core.eit import Spectrum
from ..core.kerr import MethodComparison
from ..core.simulate import Campaign
from ..types.rydberg import ReferenceNonlinearity


def _mhz(omega: float) -> str:
  return f"2π×{omega / (2 * pi * 1e6):.3f} MHz"


def _bold(text: str, color: str) -> str:
  return click.style(text, fg=color, bold=True)


def display_saved(paths: Sequence[Path]) -> None:
  for path in paths:
    click.echo(f"✅ Saved: {click.style(str(path), fg='green', underline=True)}")


def display_spectrum_summary(
  s: Spectrum,
  level: int,
  pkpk: float,
  transparency: float,
  tau_g: float | None,
  tau_g_analytic: float | None,
) -> None:
  """Display the key numbers of one EIT spectrum."""
  m = s.params
  click.echo(f"\n{click.style(f'EIT spectrum, n = {level}', fg='cyan', bold=True)}")
  click.echo("-" * 60)
  click.echo(f"OD: {_bold(f'{m.od:.3f}', 'magenta')}")
  click.echo(f"Ω_c: {_bold(_mhz(m.omega_c), 'blue')}")
  click.echo(f"γ_rel: {_bold(_mhz(m.gamma_rel), 'blue')}")
  click.echo(f"T_min: {_bold(f'{s.transmission.min():.4f}', 'yellow')}")
  click.echo(f"T(Δ=0): {_bold(f'{transparency:.4f}', 'green')}")
  click.echo(f"φ_pk-pk: {_bold(f'{pkpk:.4f} rad', 'magenta')}")
  if tau_g is not None:
    analytic = f" (analytic {tau_g_analytic * 1e9:.3f} ns)" if tau_g_analytic else ""
    click.echo(f"τ_g: {_bold(f'{tau_g * 1e9:.3f} ns', 'green')}{analytic}")
  click.echo("-" * 60)


def display_xphase_table(rows: Sequence[MethodComparison], level: int) -> None:
  """Display the cross-phase at each signal power by every evaluation method."""
  if not rows:
    click.echo("No signal powers given.")
    return
  first = rows[0].full
  click.echo(
    f"\n{click.style(f'Cross-phase, n = {level}', fg='cyan', bold=True)} "
    f"(r_b = {first.r_b * 1e6:.3f} μm)"
  )
  click.echo("-" * 96)
  click.echo(
    f"{'P_s [nW]':>10} {'closed [mrad]':>14} {'quad [mrad]':>12} {'rel diff':>10} "
    f"{'MC [mrad]':>16} {'saturated':>10} {'ρV_b':>8}"
  )
  for row in rows:
    mc = "-"
    if row.montecarlo is not None:
      mc = f"{row.montecarlo.mean * 1e3:.4f}±{row.montecarlo.stderr * 1e3:.4f}"
    ratio = row.saturated.validity_ratio
    ratio_color = "red" if "validity" in row.full.flags else "white"
    click.echo(
      f"{row.signal_power * 1e9:>10.4g} {row.closed * 1e3:>14.5f} "
      f"{row.quadrature * 1e3:>12.5f} {row.quadrature_rel_diff:>10.1e} {mc:>16} "
      f"{row.saturated.phase * 1e3:>10.4f} "
      f"{click.style(f'{ratio:>8.3g}', fg=ratio_color)}"
    )
  click.echo("-" * 96)


def display_campaign_summary(campaign: Campaign) -> None:
  sweep = campaign.sweep
  click.echo(f"\n{click.style('Synthetic campaign', fg='cyan', bold=True)}")
  click.echo("-" * 60)
  for level, conditions in sweep.conditions.items():
    rec = campaign.beatnotes[level]
    click.echo(
      f"{click.style(f'n = {level}', fg='blue', bold=True)}: "
      f"OD {conditions.od:.3f}, power factor {conditions.power_factor:.3f}, "
      f"φ_pk-pk {conditions.phi_pkpk:.3f} rad, "
      f"{len(rec.markers)} pulses at {rec.phase_step * 1e3:.3f} mrad"
    )
  click.echo(f"Sweep rows: {_bold(str(len(sweep.rows)), 'magenta')}")
  if sweep.flags:
    click.echo(f"Flags: {click.style(', '.join(sweep.flags), fg='yellow')}")
  click.echo("-" * 60)


def _fit_line(fit: FitResult, name: str, unit: str = "") -> str:
  return f"{fit[name]:.4g} ± {fit.error(name):.2g}{unit}"


def display_analysis_report(report: AnalysisReport) -> None:
  """Display per-level slopes and the power-law fit."""
  click.echo(f"\n{click.style('Slopes per level', fg='cyan', bold=True)}")
  click.echo("-" * 80)
  for lv in report.levels:
    slope = lv.fit["slope"] * lv.od * 1e-6  # rad/W per OD -> mrad/nW
    err = lv.fit.error("slope") * lv.od * 1e-6
    flags = f" [{', '.join(lv.flags)}]" if lv.flags else ""
    click.echo(
      f"{click.style(f'n = {lv.level}', fg='blue', bold=True)} (n* = {lv.n_star:.2f}): "
      f"{slope:.4g} ± {err:.2g} mrad/nW, "
      f"rescaled {lv.rescaled.value:.4g} ± {lv.rescaled.error:.2g} rad/W "
      f"({lv.points_used} points){click.style(flags, fg='yellow')}"
    )
    if lv.beatnote is not None:
      b = lv.beatnote
      line = lv.line_phase(b.signal_power)
      click.echo(
        f"  beat note at {b.signal_power * 1e9:.3g} nW: "
        f"{b.result.mean * 1e3:.4f} ± {b.result.sem * 1e3:.2g} mrad over "
        f"{b.result.n_pulses} pulses, line {line * 1e3:.4f} mrad"
      )
  law = report.power_law
  inflated = report.power_law_inflated
  click.echo("-" * 80)
  click.echo(f"Exponent: {_bold(_fit_line(law, 'exponent'), 'magenta')}")
  click.echo(f"Reduced χ²: {_bold(f'{law.chi2_reduced:.3g}', 'yellow')} ({law.dof} dof)")
  if inflated.inflation_applied > 1.0:
    click.echo(
      f"Inflated (×{inflated.inflation_applied:.3g}): "
      f"{_bold(_fit_line(inflated, 'exponent'), 'green')}"
    )
  click.echo("-" * 80)


def display_conversions(values: dict[str, float | None]) -> None:
  click.echo(f"\n{click.style('Nonlinearity figures of merit', fg='cyan', bold=True)}")
  click.echo("-" * 60)
  labels = {
    "slope_rad_per_w": ("Slope", lambda v: f"{v * 1e-6:.4g} mrad/nW"),
    "n2_m2_per_w": ("n₂", lambda v: f"{v:.3e} m²/W"),
    "chi3_m2_per_v2": ("Re χ⁽³⁾", lambda v: f"{v:.3e} m²/V²"),
    "per_photon_phase_rad": ("φ₀", lambda v: f"{v * 1e6:.1f} μrad"),
    "photons_in_medium": ("Photons in medium", lambda v: f"{v:.2f}"),
  }
  for key, (label, fmt) in labels.items():
    value = values.get(key)
    if value is not None:
      click.echo(f"{label}: {_bold(fmt(value), 'magenta')}")
  click.echo("-" * 60)


def display_reference_table(entries: Sequence[ReferenceNonlinearity]) -> None:
  click.echo(f"\n{click.style('Reported Kerr nonlinearities', fg='cyan', bold=True)}")
  click.echo("-" * 90)
  click.echo(f"{'System':<34} {'Re χ⁽³⁾':>10} {'Im χ⁽³⁾':>10} {'φ₀ [μrad]':>10}  Note")
  for e in entries:
    phi0 = "-" if e["phi0_urad_per_photon"] is None else f"{e['phi0_urad_per_photon']:g}"
    click.echo(
      f"{e['description']:<34} {e['chi3_real_m2V2']:>10.1e} "
      f"{e['chi3_imag_m2V2']:>10.1e} {phi0:>10}  {e['note']}"
    )
  click.echo("-" * 90)
