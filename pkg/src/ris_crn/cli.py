"""Command-line front end: ``sweep`` runs a Monte Carlo sweep to CSV,
``solve`` optimizes a single instance and prints the result as JSON.

The RIS_CRN_LOG environment variable (error | info | debug) controls
diagnostics verbosity on stderr.
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click

from .channels import generate_channels
from .experiments import load_sweep_spec, run_sweep
from .optimizer import run_algorithm1
from .scenario import load_scenario, paper_default

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO,
               "debug": logging.DEBUG}


def _configure_logging():
    raw = os.environ.get("RIS_CRN_LOG", "error").lower()
    if raw not in _LOG_LEVELS:
        raise click.ClickException(
            f"RIS_CRN_LOG must be one of {sorted(_LOG_LEVELS)}, got {raw!r}")
    logging.basicConfig(stream=sys.stderr, level=_LOG_LEVELS[raw],
                        format="%(levelname)s %(name)s: %(message)s")


def _load_scenario(path):
    return load_scenario(path) if path else paper_default()


@click.group()
def main():
    """RIS-aided cognitive-radio beamforming simulator."""
    _configure_logging()


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Sweep specification JSON.")
@click.option("--scenario", "scenario_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Scenario JSON (default: bundled scenario).")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, writable=True),
              help="Output CSV path.")
@click.option("--seed", default=None, type=click.IntRange(min=0),
              help="Override the spec's base seed.")
@click.option("--workers", default=1, type=click.IntRange(min=1),
              show_default=True, help="Parallel trial workers.")
def sweep(spec_path, scenario_path, out_path, seed, workers):
    """Run a tilt / elements / power sweep and write a CSV."""
    from dataclasses import replace

    spec = load_sweep_spec(spec_path)
    if seed is not None:
        spec = replace(spec, base_seed=seed)
    scenario = _load_scenario(scenario_path)
    run_sweep(spec, scenario, out_path=out_path, workers=workers)
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--scenario", "scenario_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Scenario JSON (default: bundled scenario).")
@click.option("--seed", default=0, type=click.IntRange(min=0),
              show_default=True, help="Channel and initialization seed.")
@click.option("--tilt", "fixed_tilt", default=None, type=float,
              help="Fix the tilt in degrees instead of selecting it.")
def solve(scenario_path, seed, fixed_tilt):
    """Optimize one channel realization and print the design as JSON."""
    scenario = _load_scenario(scenario_path)
    channels = generate_channels(scenario, seed=seed)
    result = run_algorithm1(channels, scenario, seed=seed,
                            fixed_tilt_deg=fixed_tilt)
    doc = {
        "se_bps_hz": result.se,
        "se_trace": [float(v) for v in result.se_trace],
        "outer_iterations": result.outer_iterations,
        "w_s": [[float(z.real), float(z.imag)] for z in result.state.w_s],
        "phases_rad": [float(p) for p in result.state.phases],
        "tilt": {
            "theta_tilt_deg": float(result.state.theta_tilt_deg),
            "branch": result.tilt.branch,
        },
        "feasibility": {
            "feasible": bool(result.feasible),
            "pu_interference_w": float(result.pu_interference_w),
            "gamma_w": float(scenario.gamma_w),
            "power_w": float(result.power_w),
            "p_max_w": float(scenario.p_max_w),
        },
    }
    click.echo(json.dumps(doc, indent=2))


if __name__ == "__main__":
    main()
