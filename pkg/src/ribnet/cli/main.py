from __future__ import annotations

from pathlib import Path
from typing import List, Optional

import typer

from ribnet.cli.runner import RunConfig, run
from ribnet.config.settings import settings
from ribnet.core.types import CommandName, ExportFormat
from ribnet.utils.status import set_quiet

app = typer.Typer(
    help="Orthogonal nets and Ribaucour transformations from nodal spectral curves.",
    no_args_is_help=True,
    add_completion=False,
)

DATASET = typer.Argument(..., help="Dataset JSON file, or a shipped name such as ds-n2-l1.")
GRID = typer.Option(None, "--grid", help="Parameter lattice 'start,stop,count[;...]'.")
TOL = typer.Option([], "--tol", help="Tolerance override KEY=VAL (repeatable).")
SEED = typer.Option(None, "--seed", help="Seed for sampled checks (default RIBNET_SEED).")
OUTPUT = typer.Option(None, "--output", "-o", help="Report or export path.")
FORMAT = typer.Option("json", "--format", "-f", help="Export format: csv, json or obj.")
PROGRESS = typer.Option(None, "--progress/--no-progress", help="Show tqdm bars on grid sweeps.")
QUIET = typer.Option(False, "--quiet", "-q", help="Silence status lines on stderr.")


def _go(
    command: CommandName,
    dataset: str,
    *,
    grid: Optional[str] = None,
    tol: Optional[List[str]] = None,
    seed: Optional[int] = None,
    output: Optional[Path] = None,
    fmt: str = "json",
    alpha: Optional[int] = None,
    progress: Optional[bool] = None,
    quiet: bool = False,
) -> None:
    if fmt not in ("csv", "json", "obj"):
        typer.echo(f"unknown format {fmt!r}", err=True)
        raise typer.Exit(code=2)
    set_quiet(True if quiet else None)
    fmt_checked: ExportFormat = fmt  # type: ignore[assignment]
    config = RunConfig(
        dataset=dataset,
        command=command,
        grid=grid,
        tol=list(tol or []),
        output=output,
        format=fmt_checked,
        seed=settings.RIBNET_SEED if seed is None else seed,
        alpha=alpha,
        progress=progress,
    )
    raise typer.Exit(code=run(config))


@app.command("validate")
def validate_cmd(dataset: str = DATASET, output: Optional[Path] = OUTPUT, quiet: bool = QUIET) -> None:
    """Check the curve data for structural admissibility."""
    _go("validate", dataset, output=output, quiet=quiet)


@app.command("omega")
def omega_cmd(
    dataset: str = DATASET,
    tol: List[str] = TOL,
    output: Optional[Path] = OUTPUT,
    quiet: bool = QUIET,
) -> None:
    """Build the differential Omega and print its residue table."""
    _go("omega", dataset, tol=tol, output=output, quiet=quiet)


@app.command("synth")
def synth_cmd(
    dataset: str = DATASET,
    grid: Optional[str] = GRID,
    tol: List[str] = TOL,
    seed: Optional[int] = SEED,
    output: Optional[Path] = OUTPUT,
    fmt: str = FORMAT,
    progress: Optional[bool] = PROGRESS,
    quiet: bool = QUIET,
) -> None:
    """Sample the orthogonal net, report its residuals and optionally export it."""
    _go("synth", dataset, grid=grid, tol=tol, seed=seed, output=output, fmt=fmt,
        progress=progress, quiet=quiet)


@app.command("transform")
def transform_cmd(
    dataset: str = DATASET,
    alpha: int = typer.Option(1, "--alpha", "-a", help="Normalization point to swap (1..l)."),
    grid: Optional[str] = GRID,
    tol: List[str] = TOL,
    seed: Optional[int] = SEED,
    output: Optional[Path] = OUTPUT,
    progress: Optional[bool] = PROGRESS,
    quiet: bool = QUIET,
) -> None:
    """Certify the Ribaucour pair obtained by swapping R_alpha."""
    _go("transform", dataset, grid=grid, tol=tol, seed=seed, output=output, alpha=alpha,
        progress=progress, quiet=quiet)


@app.command("cube")
def cube_cmd(
    dataset: str = DATASET,
    grid: Optional[str] = GRID,
    tol: List[str] = TOL,
    seed: Optional[int] = SEED,
    output: Optional[Path] = OUTPUT,
    progress: Optional[bool] = PROGRESS,
    quiet: bool = QUIET,
) -> None:
    """Build the Bianchi cube of all 2^l swapped nets."""
    _go("cube", dataset, grid=grid, tol=tol, seed=seed, output=output, progress=progress,
        quiet=quiet)


@app.command("verify")
def verify_cmd(
    dataset: str = DATASET,
    grid: Optional[str] = GRID,
    tol: List[str] = TOL,
    seed: Optional[int] = SEED,
    output: Optional[Path] = OUTPUT,
    progress: Optional[bool] = PROGRESS,
    quiet: bool = QUIET,
) -> None:
    """Run the full certification suite."""
    _go("verify", dataset, grid=grid, tol=tol, seed=seed, output=output, progress=progress,
        quiet=quiet)


@app.command("export")
def export_cmd(
    net_file: str = typer.Argument(..., help="Net JSON written by 'synth --format json'."),
    output: Path = typer.Option(..., "--output", "-o", help="Destination file."),
    fmt: str = FORMAT,
    quiet: bool = QUIET,
) -> None:
    """Convert a saved net to another format."""
    _go("export", net_file, output=output, fmt=fmt, quiet=quiet)


if __name__ == "__main__":  # pragma: no cover
    app()
