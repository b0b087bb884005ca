"""Campaign commands: synthetic datasets and their analysis."""

from collections.abc import Iterable
from pathlib import Path

import click

from ..config import Overrides, with_seed
from ..core.analysis import (
  BeatNotePhase,
  FitResult,
  analyze_sweep,
  extract_pulse_phase,
  fit_spectrum,
)
from ..core.eit import MediumParams
from ..core.errors import NumericalError
from ..core.simulate import generating_exponent, run_campaign, sweep_truth_matches
from ..output.files import (
  read_beatnote,
  read_spectrum_csv,
  read_sweep_csv,
  truth_path,
  write_analysis_curves,
  write_beatnote,
  write_json,
  write_spectrum_csv,
  write_sweep_csv,
  write_truth_csv,
)
from ..output.formatters import (
  display_analysis_report,
  display_campaign_summary,
  display_saved,
)
from .common import (
  add_options,
  handle_command_errors,
  load_context_config,
  make_provenance,
  output_options,
  resolve_output_dir,
  run_options,
)


@click.command()
@add_options(run_options)
@add_options(output_options)
@click.pass_context
@handle_command_errors
def simulate(
  ctx: click.Context, seed: int | None, no_progress: bool, output_dir: str | None
) -> None:
  """
  Generate a synthetic measurement campaign.

  Writes one spectroscopy scan and one beat-note record per level, the
  cross-phase sweep table and its ground-truth sidecar.
  """
  config = with_seed(load_context_config(ctx), seed)
  spec = config.campaign_spec()
  levels = ", ".join(str(n) for n in spec.sweep.levels)
  click.echo(f"📥 {click.style(f'Simulating levels {levels}...', fg='cyan')}")
  campaign = run_campaign(
    spec, workers=config.section("sweep")["workers"], show_progress=not no_progress
  )
  if not sweep_truth_matches(spec.sweep, campaign.sweep.truth):
    raise NumericalError("sweep ground truth disagrees with the independent cross-phase")

  directory = resolve_output_dir(config, output_dir)
  prov = make_provenance(ctx, config)
  sweep_path = directory / "sweep.csv"
  saved: list[Path] = []
  for level in spec.sweep.levels:
    saved.append(
      write_spectrum_csv(
        directory / "spectra" / f"spectrum_n{level}.csv", campaign.spectra[level], prov
      )
    )
    saved.append(
      write_beatnote(
        directory / "beatnotes" / f"beatnote_n{level}", campaign.beatnotes[level], prov
      )
    )
  saved.append(write_sweep_csv(sweep_path, campaign.sweep.rows, prov))
  saved.append(write_truth_csv(truth_path(sweep_path), campaign.sweep.truth, prov))
  summary = {
    "seed": spec.sweep.seed,
    "efficiency": spec.sweep.efficiency,
    "saturate": spec.sweep.saturate,
    "c6_mode": spec.sweep.c6_mode,
    "generating_exponent": generating_exponent(spec.sweep)
    if len(spec.sweep.levels) > 1
    else None,
    "levels": {
      str(level): {
        "od": c.od,
        "power_factor": c.power_factor,
        "phi_pkpk_rad": c.phi_pkpk,
        "gamma_rel_rad_s": c.gamma_rel,
        "beatnote_phase_step_rad": campaign.beatnotes[level].phase_step,
        "beatnote_pulses": len(campaign.beatnotes[level].markers),
      }
      for level, c in campaign.sweep.conditions.items()
    },
    "rows": len(campaign.sweep.rows),
    "flags": list(campaign.sweep.flags),
  }
  saved.append(write_json(directory / "campaign.json", summary, prov))

  display_campaign_summary(campaign)
  display_saved(saved)


def load_companions(
  dataset: Path,
  levels: Iterable[int],
  medium: MediumParams,
  spectra: bool = True,
  warn: bool = True,
) -> tuple[dict[int, FitResult], dict[int, BeatNotePhase]]:
  """Fit the spectra and demodulate the beat notes written next to a sweep table.

  Looks for `spectra/spectrum_n<level>.csv` and `beatnotes/beatnote_n<level>.json`
  beside the dataset; levels without them are skipped.
  """
  root = dataset.parent
  spectroscopy: dict[int, FitResult] = {}
  beatnotes: dict[int, BeatNotePhase] = {}
  for level in sorted(set(levels)):
    scan = root / "spectra" / f"spectrum_n{level}.csv"
    if spectra and scan.exists():
      spectroscopy[level] = fit_spectrum(read_spectrum_csv(scan, medium), warn=warn)
    header = root / "beatnotes" / f"beatnote_n{level}.json"
    if header.exists():
      rec = read_beatnote(header)
      beatnotes[level] = BeatNotePhase(
        level=level,
        signal_power=rec.signal_power,
        result=extract_pulse_phase(rec, warn=warn),
      )
  return spectroscopy, beatnotes


@click.command()
@click.argument("dataset", type=click.Path(dir_okay=False))
@click.option(
  "--linear-max",
  type=float,
  help="Upper signal power (nW) of the linear slope fit; 0 or less uses every point",
)
@click.option(
  "--spectra/--no-spectra",
  default=True,
  show_default=True,
  help="Take OD and phi_pkpk from fits of the dataset's spectroscopy scans",
)
@add_options(output_options)
@click.pass_context
@handle_command_errors
def analyze(
  ctx: click.Context,
  dataset: str,
  linear_max: float | None,
  spectra: bool,
  output_dir: str | None,
) -> None:
  """Fit per-level slopes and the power law over levels for a sweep DATASET.

  Spectroscopy scans and beat-note records written by `simulate` next to the
  dataset are fitted and demodulated as part of the analysis.
  """
  overrides: Overrides = {}
  if linear_max is not None:
    overrides = {"analysis": {"linear_max_nw": linear_max}}
  config = load_context_config(ctx, overrides)
  click.echo(f"📥 {click.style(f'Analyzing {dataset}...', fg='cyan')}")
  points = read_sweep_csv(dataset)
  spectroscopy, beatnotes = load_companions(
    Path(dataset), (p.level for p in points), config.medium, spectra=spectra
  )
  report = analyze_sweep(
    points, config.analysis, spectroscopy=spectroscopy, beatnotes=beatnotes
  )

  directory = resolve_output_dir(config, output_dir)
  prov = make_provenance(ctx, config)
  display_analysis_report(report)
  saved = [write_json(directory / "analysis.json", report.as_json(), prov)]
  saved.extend(write_analysis_curves(directory, report, prov))
  display_saved(saved)
