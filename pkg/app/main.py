# app/main.py
"""Command line entry point: simulate, optimize, coast, bounds."""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from app.handlers import handle_bounds, handle_coast, handle_optimize, handle_simulate
from core.config import Config, load_scenario_config
from core.errors import PumpTrackError
from core.logging import logger, set_verbose
from tools.csv_io import fmt15, format_report

EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _fail(e: Exception) -> click.ClickException:
    logger.error(f"{type(e).__name__}: {e}")
    return click.ClickException(str(e))


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Scenario file (key = value). Defaults to $PUMPTRACK_CONFIG or built-in defaults.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Output directory (default $PUMPTRACK_OUT_DIR or ./out).")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], out_dir: Optional[str], verbose: bool) -> None:
    set_verbose(verbose)
    env = Config()
    try:
        cfg = load_scenario_config(config_path)
    except (OSError, ValueError) as e:
        raise _fail(e)
    ctx.obj = {"config": cfg, "out": Path(out_dir or env.out_dir)}


@cli.command()
@click.option("--controls", "controls_path", type=click.Path(dir_okay=False), default=None,
              help="CSV with a u column of length N (default: zero controls).")
@click.pass_context
def simulate(ctx: click.Context, controls_path: Optional[str]) -> int:
    """Roll out a control sequence and write trajectory.csv."""
    try:
        res = handle_simulate(ctx.obj["config"], controls_path, ctx.obj["out"])
    except (PumpTrackError, ValueError, OSError) as e:
        raise _fail(e)
    click.echo(format_report({k: v for k, v in res.items() if k != "status"}), nl=False)
    return 0


@cli.command()
@click.pass_context
def optimize(ctx: click.Context) -> int:
    """Solve the pumping problem; writes u_star.csv, trajectory.csv, summary.txt."""
    try:
        res = handle_optimize(ctx.obj["config"], ctx.obj["out"])
    except (PumpTrackError, ValueError, OSError) as e:
        raise _fail(e)
    status = res.pop("status")
    click.echo(format_report(res), nl=False)
    if status != "completed":
        click.echo("solver did not converge; artifacts written from the best iterate", err=True)
        ctx.exit(EXIT_NOT_CONVERGED)
    return 0


@cli.command()
@click.option("--l", "l_values", type=float, multiple=True, help="Fixed link length [m]; repeatable.")
@click.option("--sweep", is_flag=True, help="Also evaluate l_min, the midpoint and l_max.")
@click.option("--target", type=float, default=None, help="Target angle phi [rad] (default 2*pi).")
@click.pass_context
def coast(ctx: click.Context, l_values: Sequence[float], sweep: bool, target: Optional[float]) -> int:
    """Time for the unpumped bike to reach the target angle."""
    try:
        res = handle_coast(ctx.obj["config"], l_values, sweep, target)
    except (PumpTrackError, ValueError) as e:
        raise _fail(e)
    click.echo(f"target = {fmt15(res['target'])}")
    for entry in res["entries"]:
        if "time" in entry:
            click.echo(f"l = {fmt15(entry['l'])} time = {fmt15(entry['time'])}")
        else:
            click.echo(f"l = {fmt15(entry['l'])} error = {entry['error']}")
    return 0


@cli.command()
@click.argument("l_path", type=click.Path(dir_okay=False))
@click.argument("a_path", type=click.Path(dir_okay=False), required=False)
@click.option("--smooth", "smooth_window", type=int, default=None,
              help="Moving-average window for the derived acceleration (no a series given).")
@click.option("--write-config", type=click.Path(dir_okay=False), default=None,
              help="Merge the bounds into this scenario file.")
def bounds(l_path: str, a_path: Optional[str], smooth_window: Optional[int], write_config: Optional[str]) -> int:
    """Link-length and link-acceleration bounds from recorded series."""
    try:
        res = handle_bounds(l_path, a_path, smooth_window, write_config)
    except (PumpTrackError, ValueError, OSError) as e:
        raise _fail(e)
    click.echo(format_report(res["bounds"]), nl=False)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Process entry point: 0 success, 1 input error, 2 solver non-convergence."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Abort:
        return EXIT_INPUT_ERROR
    except click.ClickException as e:
        # usage errors included; 2 is reserved for non-convergence
        e.show()
        return EXIT_INPUT_ERROR
    return int(rv or 0)


if __name__ == "__main__":
    sys.exit(main())
