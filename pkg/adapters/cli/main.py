"""CLI main application."""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from adapters.io.documents import DocumentAdapter
from adapters.io.edge_list import EdgeListAdapter
from adapters.reports.writer import ReportWriter, collect_versions
from config.settings import get_settings
from core.domain.entities import (
    ExperimentConfig,
    Metric,
    PartitionStrategy,
    SearchMode,
    StarMode,
    Subcommand,
)
from core.exceptions import ErrorCode, GraphLimException, get_exit_code
from core.usecases.experiments import ExperimentRunner, RunResult


def configure_logging(level: str = "INFO", fmt: str = "json") -> None:
    """structlog on top of stdlib logging, writing to stderr."""
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=getattr(logging, level, logging.INFO), force=True)
    renderer = structlog.dev.ConsoleRenderer() if fmt == "console" else structlog.processors.JSONRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


logger = structlog.get_logger()
console = Console()
err_console = Console(stderr=True)

app = typer.Typer(
    name="graphlim",
    help="Local statistics, graph distances and limits of bounded-degree graph sequences",
    add_completion=False
)

from adapters.cli.config_commands import app as config_app  # noqa: E402
app.add_typer(config_app, name="config")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override GRAPHLIM_LOG_LEVEL"),
):
    """Configure logging before any command runs."""
    try:
        settings = get_settings()
    except ValidationError as e:
        err_console.print(f"[bold red]✗ Invalid settings: {e.errors()[0]['msg']}[/bold red]")
        raise typer.Exit(1)
    configure_logging((log_level or settings.LOG_LEVEL).upper(), settings.LOG_FORMAT)


def build_config(subcommand: Subcommand, **overrides: Any) -> ExperimentConfig:
    """Settings defaults, then the flags actually given on the command line."""
    values: Dict[str, Any] = get_settings().experiment_defaults()
    values.update({key: value for key, value in overrides.items() if value is not None})
    values["subcommand"] = subcommand.value
    return ExperimentConfig.model_validate(values)


def _runner(config: ExperimentConfig) -> ExperimentRunner:
    return ExperimentRunner(
        graphs=EdgeListAdapter(),
        documents=DocumentAdapter(),
        sink=ReportWriter(config.output_dir, config.formats),
        versions=collect_versions(),
    )


def _show(result: RunResult) -> None:
    console.print_json(json.dumps(result.report["results"], default=str, sort_keys=True))
    if result.report["checks"]:
        table = Table(title="Checks")
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        for name, value in sorted(result.report["checks"].items()):
            status = "[green]✓[/green]" if value is True else ("[red]✗[/red]" if value is False else str(value))
            table.add_row(name, status)
        err_console.print(table)
    for location in result.files:
        err_console.print(f"[dim]wrote {location}[/dim]")


def execute(config: ExperimentConfig) -> RunResult:
    """Run a config and map failures onto exit codes: 1 for bad input, 2 for invariant violations."""
    try:
        result = _runner(config).run(config)
    except GraphLimException as e:
        err_console.print(f"[bold red]✗ {e.error_code.value}: {e.message}[/bold red]")
        raise typer.Exit(get_exit_code(e.error_code))
    except OSError as e:
        err_console.print(f"[bold red]✗ {e}[/bold red]")
        raise typer.Exit(1)
    except Exception as e:
        logger.error("Unhandled failure", error=str(e), exc_info=True)
        err_console.print(f"[bold red]✗ Internal error: {e}[/bold red]")
        raise typer.Exit(get_exit_code(ErrorCode.INTERNAL_ERROR))
    _show(result)
    return result


def _configured(subcommand: Subcommand, **overrides: Any) -> ExperimentConfig:
    try:
        return build_config(subcommand, **overrides)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<config>"
        err_console.print(f"[bold red]✗ Invalid value for '{field}': {first['msg']}[/bold red]")
        raise typer.Exit(1)


def _params(values: List[str]) -> Dict[str, str]:
    params = {}
    for item in values:
        if "=" not in item:
            err_console.print(f"[bold red]✗ Invalid value for 'param': expected KEY=VALUE, got {item}[/bold red]")
            raise typer.Exit(1)
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()
    return params


OUTPUT_DIR = typer.Option(None, "--output-dir", help="Report directory")
FORMATS = typer.Option(None, "--format", help="Report formats (json, csv); repeatable")
THREADS = typer.Option(None, "--threads", help="Worker threads")
SEED = typer.Option(None, "--seed", help="Random seed (default GRAPHLIM_SEED)")
MANIFEST = typer.Option(None, "--seq", help="Sequence manifest JSON")


@app.command()
def gen(
    family: str = typer.Option(..., help="path, cycle, torus, box, tree-ball or random-regular"),
    n: Optional[int] = typer.Option(None, help="Vertex count (path, cycle, random-regular)"),
    b: Optional[int] = typer.Option(None, help="Side length (torus, box)"),
    dim: Optional[int] = typer.Option(None, help="Dimension (torus, box)"),
    depth: Optional[int] = typer.Option(None, help="Depth (tree-ball)"),
    d: Optional[int] = typer.Option(None, help="Degree (random-regular)"),
    param: List[str] = typer.Option([], "--param", help="Extra KEY=VALUE parameter"),
    output: Optional[str] = typer.Option(None, "-o", "--output", help="Edge-list file to write"),
    seed: Optional[int] = SEED,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Generate a member of a graph family."""
    params: Dict[str, Any] = {
        key: value for key, value in {"n": n, "b": b, "dim": dim, "depth": depth, "d": d}.items()
        if value is not None
    }
    params.update(_params(param))
    execute(_configured(
        Subcommand.GEN, family=family, params=params, output=output, seed=seed,
        output_dir=output_dir, formats=formats,
    ))


@app.command()
def stats(
    files: List[str] = typer.Argument(None, help="One or two edge-list files"),
    radius: Optional[int] = typer.Option(None, "--radius", help="Largest ball radius"),
    manifest: Optional[str] = MANIFEST,
    max_pairs: Optional[int] = typer.Option(None, "--max-pairs", help="Sampled pairs in the Cauchy profile"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Convergence tolerance"),
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Local statistics of graphs, or the weak Cauchy profile of a sequence."""
    execute(_configured(
        Subcommand.STATS, inputs=files or [], radius=radius, manifest=manifest, max_pairs=max_pairs,
        tolerance=tolerance, threads=threads, output_dir=output_dir, formats=formats,
    ))


@app.command()
def dist(
    files: List[str] = typer.Argument(None, help="Two edge-list files"),
    metric: Metric = typer.Option(Metric.DELTA_S, "--metric", help="delta, deltaS or deltaRho"),
    exact_limit: Optional[int] = typer.Option(None, "--exact-limit", help="Largest vertex count for exact search"),
    multiple_cap: Optional[int] = typer.Option(None, "--multiple-cap", help="Largest multiple tried for deltaRho"),
    search_mode: Optional[SearchMode] = typer.Option(None, "--search-mode", help="exact or heuristic"),
    star_mode: Optional[StarMode] = typer.Option(None, "--star-mode", help="induced or incident"),
    manifest: Optional[str] = MANIFEST,
    eps1: Optional[float] = typer.Option(None, "--eps1", help="Cut budget for partition-based bounds"),
    radius: Optional[int] = typer.Option(None, "--radius", help="Radius of the weak profile"),
    seed: Optional[int] = SEED,
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Distance between two graphs, or the strong Cauchy profile of a sequence."""
    execute(_configured(
        Subcommand.DIST, inputs=files or [], metric=metric, exact_limit=exact_limit, multiple_cap=multiple_cap,
        search_mode=search_mode, star_mode=star_mode, manifest=manifest, eps1=eps1, radius=radius, seed=seed,
        threads=threads, output_dir=output_dir, formats=formats,
    ))


@app.command()
def partition(
    files: List[str] = typer.Argument(None, help="One or two edge-list files"),
    eps: Optional[float] = typer.Option(None, "--eps", help="Cut fraction budget"),
    strategy: Optional[PartitionStrategy] = typer.Option(None, "--strategy", help="auto, path, torus, tree or carve"),
    max_component: Optional[int] = typer.Option(None, "--max-component", help="Ball-carving size cap"),
    check: bool = typer.Option(False, "--check", help="Re-validate partition invariants"),
    eps1: Optional[float] = typer.Option(None, "--eps1", help="Cut budget for the pipeline bound"),
    manifest: Optional[str] = MANIFEST,
    seed: Optional[int] = SEED,
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Hyperfinite partition of graphs, or hyperfiniteness evidence for a sequence."""
    execute(_configured(
        Subcommand.PARTITION, inputs=files or [], eps=eps, strategy=strategy, max_component=max_component,
        check=check, eps1=eps1, manifest=manifest, seed=seed, threads=threads,
        output_dir=output_dir, formats=formats,
    ))


@app.command()
def limit(
    functional: str = typer.Option(..., "--functional", help="vcount, ecount, log-indep-sets or eig-count:<kernel>"),
    manifest: str = typer.Option(..., "--seq", help="Sequence manifest JSON"),
    check: bool = typer.Option(False, "--check", help="Verify almost-additivity on consecutive members"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Convergence tolerance"),
    exact_limit: Optional[int] = typer.Option(None, "--exact-limit", help="Largest vertex count for exact search"),
    seed: Optional[int] = SEED,
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Normalized limit of a functional along a sequence."""
    execute(_configured(
        Subcommand.LIMIT, functional=functional, manifest=manifest, check=check, tolerance=tolerance,
        exact_limit=exact_limit, seed=seed, threads=threads, output_dir=output_dir, formats=formats,
    ))


@app.command()
def subadd(
    manifest: str = typer.Option(..., "--seq", help="Sequence manifest JSON"),
    functional: Optional[str] = typer.Option(None, "--functional", help="Subadditive functional"),
    strict: bool = typer.Option(False, "--strict", help="Also check monotonicity under edge removal"),
    floor: Optional[float] = typer.Option(None, "--floor", help="Values below this indicate divergence"),
    seed: Optional[int] = SEED,
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Subadditive limit and axiom checks along a sequence."""
    execute(_configured(
        Subcommand.SUBADD, manifest=manifest, functional=functional, strict=strict, floor=floor, seed=seed,
        threads=threads, output_dir=output_dir, formats=formats,
    ))


@app.command()
def ids(
    manifest: str = typer.Option(..., "--seq", help="Sequence manifest JSON"),
    kernel: str = typer.Option("adjacency", "--kernel", help="Built-in kernel name or KernelSpec JSON file"),
    reference: Optional[str] = typer.Option(None, "--reference", help="arccos-1d, lattice-2d or kesten-mckay:<d>"),
    dense_limit: Optional[int] = typer.Option(None, "--dense-limit", help="Largest matrix solved densely"),
    threads: Optional[int] = THREADS,
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Integrated densities of states along a sequence."""
    execute(_configured(
        Subcommand.IDS, manifest=manifest, kernel=kernel, reference=reference, dense_limit=dense_limit,
        threads=threads, output_dir=output_dir, formats=formats,
    ))


@app.command()
def fekete(
    input_file: str = typer.Option(..., "--input", help="CSV or text file of a_1, a_2, ..."),
    output_dir: Optional[str] = OUTPUT_DIR,
    formats: Optional[List[str]] = FORMATS,
):
    """Subadditivity check and limit of a real sequence."""
    execute(_configured(Subcommand.FEKETE, inputs=[input_file], output_dir=output_dir, formats=formats))


@app.command()
def run(
    config_file: str = typer.Option(..., "--config", help="ExperimentConfig JSON file"),
):
    """Run a serialized experiment configuration."""
    path = Path(config_file)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        err_console.print(f"[bold red]✗ Cannot read config {path}: {e}[/bold red]")
        raise typer.Exit(1)
    if not isinstance(document, dict) or "subcommand" not in document:
        err_console.print("[bold red]✗ Invalid value for 'subcommand': field required[/bold red]")
        raise typer.Exit(1)
    try:
        subcommand = Subcommand(document.pop("subcommand"))
    except ValueError as e:
        err_console.print(f"[bold red]✗ Invalid value for 'subcommand': {e}[/bold red]")
        raise typer.Exit(1)
    execute(_configured(subcommand, **document))


if __name__ == "__main__":
    app()
