"""Command-line front end: scenario batches, gain calibration, map listing."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import maps
from .calibrate import DegenerateLogError, calibrate_from_log
from .config import ConfigError, load_config
from .runner import run_batch, summarize, write_artifacts

VARIANT_ALIASES = {"t0": "t0", "t5": "t5", "k": "kalman", "kalman": "kalman"}

BUNDLED_CONFIG_DIR = Path(__file__).parent / "data"


def resolve_config_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = BUNDLED_CONFIG_DIR / f"{name}.yaml"
    if bundled.exists():
        return bundled
    raise click.ClickException(f"no such config: {name}")


@click.group()
def main():
    """U-Chain tunnel relay-chain simulator."""


@main.command()
@click.argument("config")
@click.option("--seed", type=int, default=None, help="Base RNG seed override.")
@click.option("--replicates", type=int, default=None)
@click.option("--variant", type=click.Choice(["T0", "T5", "K"], case_sensitive=False),
              default=None, help="Force one policy variant.")
@click.option("--out", "out_dir", default=None,
              help="Output directory (default $UCHAIN_OUT or ./uchain_out).")
@click.option("--jobs", type=int, default=1, help="Parallel replicate workers.")
@click.option("--serve", is_flag=True,
              help="Interactive mode: start the telemetry server instead of a batch.")
@click.option("--port", type=int, default=8008, help="Telemetry port for --serve.")
def run(config, seed, replicates, variant, out_dir, jobs, serve, port):
    """Run a scenario config (a path or a bundled name; see list-envs)."""
    path = resolve_config_path(config)
    overrides = {"seed": seed, "replicates": replicates}
    if variant is not None:
        overrides["variant"] = VARIANT_ALIASES[variant.lower()]
        overrides["variants"] = []
        overrides["tolerance"] = None
    try:
        cfg = load_config(path, overrides)
    except ConfigError as e:
        raise click.ClickException(str(e))
    if serve:
        from .telemetry import serve_interactive

        click.echo(f"interactive mode on ws://localhost:{port}/ws")
        serve_interactive(cfg, port=port)
        return
    root = out_dir or os.environ.get("UCHAIN_OUT") or "uchain_out"
    out = Path(root) / cfg.name
    records = run_batch(cfg, out_dir=out, jobs=jobs)
    write_artifacts(records, out)
    click.echo(summarize(records), nl=False)
    click.echo(f"artifacts in {out}")
    n_faults = sum(len(r.metrics.faults) for r in records)
    if n_faults:
        click.echo(f"note: {n_faults} fault event(s), see summary.txt")


@main.command("calibrate-a")
@click.argument("log", type=click.Path(exists=True))
def calibrate_a(log):
    """Fit the Kalman control gain A from a logged separation run."""
    try:
        a, resid = calibrate_from_log(log)
    except DegenerateLogError as e:
        raise click.ClickException(str(e))
    click.echo(f"fitted A = {a:.6f} quality units per (m/s), "
               f"RMS residual = {resid:.6f}")


@main.command("list-envs")
def list_envs():
    """List bundled maps and scenario configs."""
    click.echo("bundled maps:")
    for name in sorted(maps.BUNDLED):
        env = maps.BUNDLED[name]()
        click.echo(f"  {name:<12} length {env.length:.0f} m, "
                   f"{len(env.walls)} walls")
    click.echo("bundled configs:")
    for p in sorted(BUNDLED_CONFIG_DIR.glob("*.yaml")):
        click.echo(f"  {p.stem}")


if __name__ == "__main__":
    sys.exit(main())
