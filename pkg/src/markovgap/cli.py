"""Command-line interface: reproduction tables, crossover/decay scans,
Markov-gap optimization on named states, and the property-suite runner.

Exit codes: 0 success, 1 property/check failure, 2 configuration error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import serialize
from .formulas import LOG_SQRT_4_3, crossover_scan, decay_bound_check
from .operators import DensityOperator
from .optimize import (
    SearchConfig,
    fidelity_markov_gap_upper,
    relent_markov_gap_upper,
    renyi_markov_gap_upper,
)
from .report import DEFAULT_SEED, RunConfig, run_property_suite, run_table, table_to_csv, table_to_json
from .states import ghz_state, random_density, uniform_antisym_state

SUITES = ("algebra", "measures", "markov", "optimization", "appendix", "all")


@click.group()
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Stream seed.")
@click.option("--tol", type=float, default=None, help="Override every property tolerance.")
@click.option("--dim-cap", type=int, default=None, help="Dense-dimension cap (default env/4096).")
@click.option(
    "--log-base",
    type=click.Choice(["nats", "bits"]),
    default="nats",
    show_default=True,
    help="Display unit for entropic values.",
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
    help="Table output format.",
)
@click.option("--out", "output_path", type=click.Path(), default=None, help="Output file.")
@click.pass_context
def main(ctx, seed, tol, dim_cap, log_base, output_format, output_path):
    """Numerics for conditional mutual information vs divergence distance to
    quantum Markov states."""
    try:
        ctx.obj = RunConfig(
            log_base=log_base,
            tol=tol,
            seed=seed,
            dim_cap=dim_cap,
            output_format=output_format,
            output_path=output_path,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


@main.command()
@click.argument("dims", type=int, nargs=-1, required=True)
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render a figure next to --out.")
@click.option("--plot-path", type=click.Path(), default=None, help="Explicit figure path.")
@click.pass_obj
def table(config: RunConfig, dims, plot, plot_path):
    """One row per dimension D: exact CMI, dense check, constant bounds."""
    rows = run_table(config, dims)
    text = table_to_csv(rows) if config.output_format == "csv" else table_to_json(rows)
    if not config.output_path:
        click.echo(text, nl=False)
    figure_target = plot_path
    if figure_target is None and plot and config.output_path:
        figure_target = str(Path(config.output_path).with_suffix(".png"))
    if figure_target:
        from .plotting import render_separation_figure

        render_separation_figure(rows, figure_target, config.log_base)
        click.echo(f"figure written to {figure_target}", err=True)


@main.command()
@click.argument("d_min", type=int, default=3)
@click.argument("d_max", type=int, default=100)
@click.option("--plot-path", type=click.Path(), default=None, help="Render the scan as a figure.")
@click.pass_obj
def crossover(config: RunConfig, d_min, d_max, plot_path):
    """Smallest D in [D_MIN, D_MAX] where the constant bound beats the CMI."""
    try:
        found = crossover_scan(d_min, d_max)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    payload = {
        "d_min": d_min,
        "d_max": d_max,
        "crossover_d": found,
        "constant": LOG_SQRT_4_3 * config.unit_scale,
        "log_base": config.log_base,
    }
    text = serialize.dumps(payload) + "\n"
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        click.echo(text, nl=False)
    if plot_path:
        from .plotting import render_separation_figure
        from .report import table_rows

        rows = table_rows(config, [])
        render_separation_figure(rows, plot_path, config.log_base)
        click.echo(f"figure written to {plot_path}", err=True)


@main.command()
@click.argument("d_max", type=int, default=10_000)
@click.pass_obj
def decay(config: RunConfig, d_max):
    """Check CMI <= 4/(d-1) for every 3 <= d <= D_MAX."""
    try:
        holds = decay_bound_check(d_max)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    payload = {"d_max": d_max, "holds": holds}
    text = serialize.dumps(payload) + "\n"
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        click.echo(text, nl=False)
    if not holds:
        sys.exit(1)


def _named_state(name: str, seed: int) -> DensityOperator:
    if name == "ghz":
        return ghz_state().to_density()
    if name.startswith("antisym:"):
        try:
            d, k = (int(x) for x in name.split(":", 1)[1].split(","))
        except ValueError:
            raise click.UsageError(f"cannot parse {name!r}; expected antisym:D,K")
        return uniform_antisym_state(d, k)
    if name.startswith("random:"):
        parts = name.split(":", 1)[1].split(",")
        try:
            dims = tuple(int(x) for x in parts[:-1]) if len(parts) > 1 else (2, 2, 2)
            rank = int(parts[-1]) if len(parts) > 1 else int(parts[0])
        except ValueError:
            raise click.UsageError(f"cannot parse {name!r}; expected random:DA,DB,DC,RANK")
        return random_density(dims, rank, seed)
    raise click.UsageError(
        f"unknown state {name!r}; use ghz, antisym:D,K or random:DA,DB,DC,RANK"
    )


@main.command()
@click.argument("state", type=str)
@click.option("--alpha", type=float, default=None, help="Renyi order (0 uses D_0, 1 uses D_1).")
@click.option(
    "--objective",
    type=click.Choice(["renyi", "relent", "dmin"]),
    default="relent",
    show_default=True,
)
@click.option("--restarts", type=int, default=8, show_default=True)
@click.option("--iters", type=int, default=2000, show_default=True)
@click.option("--blocks", type=int, default=3, show_default=True)
@click.pass_obj
def opt(config: RunConfig, state, alpha, objective, restarts, iters, blocks):
    """Heuristic Markov-gap upper bound on a named STATE."""
    rho = _named_state(state, config.seed)
    cfg = SearchConfig(blocks=blocks, restarts=restarts, iters=iters, seed=config.seed)
    if objective == "renyi":
        if alpha is None:
            raise click.UsageError("--objective renyi needs --alpha")
        report = renyi_markov_gap_upper(rho, alpha, cfg)
    elif objective == "relent":
        report = relent_markov_gap_upper(rho, cfg) if alpha is None else renyi_markov_gap_upper(
            rho, alpha, cfg
        )
    else:
        report = fidelity_markov_gap_upper(rho, cfg)
    payload = report.to_json_dict()
    payload["value"] = payload["value"] * config.unit_scale
    payload["log_base"] = config.log_base
    text = serialize.dumps(payload) + "\n"
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@click.pass_obj
def verify(config: RunConfig, suite):
    """Run a named invariant suite; nonzero exit on any failure."""
    status, report = run_property_suite(config, suite)
    text = serialize.dumps(report) + "\n"
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        click.echo(text, nl=False)
    if status:
        sys.exit(status)


if __name__ == "__main__":
    main()
