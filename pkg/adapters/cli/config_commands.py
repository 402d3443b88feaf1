"""Configuration management CLI commands."""

import json
from typing import Any, Dict, List

import typer
from rich.console import Console
from rich.table import Table

from adapters.io.atomic import atomic_write_text
from config.settings import get_settings, validate_settings
from config.validation import get_config_summary, validate_environment_file

app = typer.Typer(help="Configuration management commands")
console = Console()


@app.command("validate")
def validate_config(
    env_file: str = typer.Option(".env", help="Environment file to inspect"),
):
    """
    Validate the current configuration.

    Loads the settings, inspects the environment file and lists
    settings that make reports hard to reproduce.
    """
    console.print("\n[bold blue]Configuration Validation[/bold blue]\n")

    validation_results = validate_settings()
    if validation_results["valid"]:
        console.print("[bold green]Configuration is valid[/bold green]\n")
    else:
        console.print("[bold red]Configuration has errors[/bold red]\n")

    _display_messages("Configuration Errors", validation_results["errors"], "red")
    _display_messages("Configuration Warnings", validation_results["warnings"], "yellow")
    _display_env_file_check(validate_environment_file(env_file))

    summary = validation_results.get("summary", {})
    if summary:
        _display_config_summary(summary)

    if not validation_results["valid"]:
        raise typer.Exit(1)


@app.command("summary")
def config_summary():
    """
    Display a summary of the current configuration.
    """
    console.print("\n[bold blue]Configuration Summary[/bold blue]\n")

    try:
        settings = get_settings()
    except ValueError as e:
        console.print(f"[bold red]Failed to load settings: {str(e)}[/bold red]")
        raise typer.Exit(1)
    _display_config_summary(get_config_summary(settings))


@app.command("env-check")
def env_file_check(
    env_file: str = typer.Option(".env", help="Environment file to inspect"),
):
    """
    Check an environment file for unknown GRAPHLIM_ variables.
    """
    console.print("\n[bold blue]Environment File Check[/bold blue]\n")

    env_check = validate_environment_file(env_file)
    _display_env_file_check(env_check)
    if env_check["errors"]:
        raise typer.Exit(1)


@app.command("export")
def export_config(
    output_file: str = typer.Option("experiment_defaults.json", help="Output file path"),
    subcommand: str = typer.Option(None, help="Add a subcommand so the file works with 'graphlim run'"),
):
    """
    Export the experiment defaults derived from the current settings.
    """
    try:
        settings = get_settings()
    except ValueError as e:
        console.print(f"[bold red]Export failed: {str(e)}[/bold red]")
        raise typer.Exit(1)

    document: Dict[str, Any] = settings.experiment_defaults()
    if subcommand:
        document["subcommand"] = subcommand

    path = atomic_write_text(output_file, json.dumps(document, indent=2, sort_keys=True) + "\n")
    console.print(f"[bold green]Experiment defaults exported to {path}[/bold green]")


def _display_messages(title: str, messages: List[str], style: str):
    if not messages:
        return
    table = Table(title=title, show_header=False)
    table.add_column("Message", style=style)
    for message in messages:
        table.add_row(f"• {message}")
    console.print(table)
    console.print()


def _display_env_file_check(env_check: Dict[str, Any]):
    """Display environment file check results."""
    if env_check["file_exists"]:
        console.print("[green]Environment file found[/green]")
    else:
        console.print("[yellow]Environment file not found; defaults apply[/yellow]\n")
        return

    if env_check["graphlim_vars"]:
        present_table = Table(title="Settings From File", show_header=False)
        present_table.add_column("Variable", style="green")
        for var in env_check["graphlim_vars"]:
            present_table.add_row(f"• {var}")
        console.print(present_table)
        console.print()

    _display_messages("Environment File Warnings", env_check["warnings"], "yellow")
    _display_messages("Environment File Errors", env_check["errors"], "red")


def _display_config_summary(summary: Dict[str, Any]):
    """Display configuration summary."""
    summary_table = Table(title="Configuration Summary")
    summary_table.add_column("Setting", style="cyan")
    summary_table.add_column("Value", style="white")

    summary_table.add_row("Environment", str(summary.get("environment", "unknown")))
    summary_table.add_row("Log Level", str(summary.get("log_level", "unknown")))
    summary_table.add_row("Log Format", str(summary.get("log_format", "unknown")))
    summary_table.add_row("Seed", str(summary.get("seed", "unknown")))
    summary_table.add_row("Threads", str(summary.get("threads", "unknown")))

    for section in ("canonical", "metrics", "spectral", "generation", "reports"):
        for key, value in summary.get(section, {}).items():
            summary_table.add_row(f"{section}.{key}", str(value))

    console.print(summary_table)
    console.print()


if __name__ == "__main__":
    app()
