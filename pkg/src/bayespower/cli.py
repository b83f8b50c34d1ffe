"""Command-line front door.

Exit codes: 0 on success, 2 when the computation completed with
degraded-quality warnings (details on stderr as JSON), 1 on errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .approx import DesignSpec
from .errors import BayesPowerError
from .oracle import reports_to_csv, variance_study as run_variance_study
from .oracle import conventional_curve
from .powercurve import power_curve
from .service import create_app, load_config, parse_n_grid


def _load_design(spec_path: str, seed: int | None) -> DesignSpec:
    try:
        design = DesignSpec.from_json(Path(spec_path).read_text())
    except FileNotFoundError:
        raise click.ClickException(f"spec file not found: {spec_path}")
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"spec is not valid JSON: {exc}")
    except BayesPowerError as exc:
        raise click.ClickException(f"invalid design spec: {exc}")
    if seed is not None:
        design = design.with_seed(seed)
    return design


@click.group()
def main():
    """Power-curve approximation for two-group Bayesian hypothesis tests."""


@main.command()
@click.option("--spec", required=True, help="design spec JSON file")
@click.option("--seed", type=int, default=None, help="override the spec's seed")
@click.option("--out", type=str, default=None, help="write full result JSON here")
@click.option("--csv", "csv_path", type=str, default=None, help="write n,power CSV here")
@click.option("--parallelism", type=int, default=1, help="worker threads for per-point solves")
def curve(spec, seed, out, csv_path, parallelism):
    """Approximate the power curve and print the sample-size recommendation."""
    design = _load_design(spec, seed)
    try:
        result = power_curve(design, workers=parallelism)
    except BayesPowerError as exc:
        raise click.ClickException(str(exc))
    if out:
        Path(out).write_text(result.to_json())
    if csv_path:
        Path(csv_path).write_text(result.to_csv())
    click.echo(
        json.dumps(
            {
                "recommendation": result.recommendation,
                "n0": result.n0,
                "n_star": result.n_star,
                "reinit_count": result.reinit_count,
                "warnings": result.warnings,
            },
            sort_keys=True,
        )
    )
    if result.warnings:
        click.echo(json.dumps({"warnings": result.warnings}), err=True)
        sys.exit(2)


@main.command()
@click.option("--spec", required=True, help="design spec JSON file")
@click.option("--n-grid", "n_grid", required=True, help="start:stop:step or comma list")
@click.option("--reps", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=None, help="override the spec's seed")
@click.option("--out", type=str, default=None, help="write CSV here (default stdout)")
def verify(spec, n_grid, reps, seed, out):
    """Estimate power on a sample-size grid by raw-data simulation."""
    if reps < 100:
        raise click.UsageError("reps must be >= 100")
    design = _load_design(spec, seed)
    try:
        grid = parse_n_grid(n_grid if ":" in n_grid else [int(v) for v in n_grid.split(",")])
        reports = conventional_curve(design, grid, reps, seed=design.seed)
    except (ValueError, BayesPowerError) as exc:
        raise click.ClickException(str(exc))
    text = reports_to_csv(reports)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("variance-study")
@click.option("--spec", required=True, help="design spec JSON file")
@click.option("--m", type=int, default=1024, show_default=True, help="points per estimate")
@click.option("--reps", type=int, default=200, show_default=True, help="replications per n")
@click.option("--n-grid", "n_grid", default=None, help="start:stop:step or comma list; default: around the recommendation")
@click.option("--seed", type=int, default=None, help="override the spec's seed")
def variance_study(spec, m, reps, n_grid, seed):
    """Compare the precision of Sobol' and pseudorandom power estimates."""
    design = _load_design(spec, seed)
    try:
        if n_grid is None:
            rec = power_curve(design).recommendation
            grid = sorted({max(2, int(round(rec * f))) for f in (0.8, 1.0, 1.2)})
        else:
            grid = parse_n_grid(n_grid if ":" in n_grid else [int(v) for v in n_grid.split(",")])
        rows = run_variance_study(design, grid, m=m, replications=reps, seed=design.seed)
    except (ValueError, BayesPowerError) as exc:
        raise click.ClickException(str(exc))
    click.echo("n,sobol_sd,prng_sd,sobol_mean,prng_mean")
    for r in rows:
        click.echo(
            f"{r.n},{r.sobol_sd:.6f},{r.prng_sd:.6f},{r.sobol_mean:.6f},{r.prng_mean:.6f}"
        )


@main.command()
@click.option("--config", "config_path", type=str, default=None, help="TOML config file")
def serve(config_path):
    """Run the HTTP service until interrupted."""
    import uvicorn

    cfg = load_config(config_path)
    app = create_app(cfg)
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    except SystemExit:
        raise
    except OSError as exc:
        raise click.ClickException(f"cannot bind {cfg.host}:{cfg.port}: {exc}")


if __name__ == "__main__":
    main()
