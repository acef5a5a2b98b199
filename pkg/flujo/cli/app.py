"""
Aplicación CLI de FLUJO.

Solo traduce subcomandos en llamadas a ``flujo.experiments`` y en códigos de
salida: 0 éxito, 1 fallo de integración/integridad, 2 validación fallida,
64 error de configuración o de parámetros.
"""

import logging
import os
from pathlib import Path
from typing import Callable, Optional

# Proyecto raíz para .env
_ROOT = Path(__file__).resolve().parents[2]

try:
    from dotenv import load_dotenv

    _env = _ROOT / ".env"
    if _env.exists():
        load_dotenv(_env)
    load_dotenv()
except Exception:
    pass

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from flujo import __version__
from flujo.core.errors import ConfigError, FlujoError, IntegrationError, ParameterError
from flujo.core.runtime import default_workers
from flujo.experiments.config import ConfigLoader, ExperimentConfig, dump_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_CONFIG = 64

app = typer.Typer(
    name="sim",
    help="FLUJO - transferencia unidireccional de energía y estados por disipación de cavidad",
    add_completion=False,
    no_args_is_help=True,
)

console = Console()
err_console = Console(stderr=True)


def setup_logging(verbose: bool) -> None:
    level = "DEBUG" if verbose else os.environ.get("FLUJO_LOG_LEVEL", "WARNING").upper()
    logger = logging.getLogger("flujo")
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=err_console, show_path=False, rich_tracebacks=False))
    logger.setLevel(level if isinstance(logging.getLevelName(level), int) else "WARNING")
    logger.propagate = False


def _load(config: str, expected: Optional[str]) -> ExperimentConfig:
    cfg = ConfigLoader().load(config)
    if expected and cfg.experiment != expected:
        raise ConfigError(f"'{config}' describe un experimento '{cfg.experiment}', se esperaba '{expected}'")
    return cfg


def _execute(
    config: str,
    expected: Optional[str],
    print_config: bool,
    verbose: bool,
    action: Callable[[ExperimentConfig], int],
) -> None:
    setup_logging(verbose)
    cfg: Optional[ExperimentConfig] = None
    try:
        cfg = _load(config, expected)
        if print_config:
            console.print(dump_config(cfg), markup=False, highlight=False, end="")
            raise typer.Exit(EXIT_OK)
        code = action(cfg)
    except (ConfigError, ParameterError) as e:
        err_console.print(f"[red]✘ {type(e).__name__}: {e}[/red]")
        raise typer.Exit(EXIT_CONFIG)
    except FlujoError as e:
        err_console.print(f"[red]✘ {type(e).__name__}: {e}[/red]")
        if isinstance(e, IntegrationError) and e.diagnostic:
            err_console.print(f"[dim]diagnóstico: {e.diagnostic}[/dim]")
        if cfg is not None:
            err_console.print(Panel(Text(dump_config(cfg)), title="Configuración resuelta", border_style="red"))
        raise typer.Exit(EXIT_FAILURE)
    raise typer.Exit(code)


def _files_table(title: str, files) -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Archivo", style="green")
    for f in files:
        table.add_row(str(f))
    return table


def _summary_panel(title: str, summary: dict, keys) -> Panel:
    lines = []
    for key in keys:
        if key in summary:
            value = summary[key]
            lines.append(f"[bold]{key}:[/bold] {value:.6g}" if isinstance(value, float) else f"[bold]{key}:[/bold] {value}")
    return Panel.fit("\n".join(lines), title=title, border_style="cyan")


ConfigOpt = typer.Option(..., "--config", "-c", help="Ruta YAML o nombre de preset")
OutOpt = typer.Option(None, "--out", "-o", help="Directorio de salida")
PrintOpt = typer.Option(False, "--print-config", help="Muestra la configuración resuelta y termina")
VerboseOpt = typer.Option(False, "--verbose", "-v", help="Log en nivel DEBUG")


@app.command()
def energy(
    config: str = ConfigOpt,
    out: Optional[Path] = OutOpt,
    print_config: bool = PrintOpt,
    verbose: bool = VerboseOpt,
):
    """
    Transferencia de energía con dos qubits (serie temporal + resumen)

    Ejemplos:
        sim energy --config energy_transfer
    """
    from flujo.experiments.energy import run_energy_transfer

    def action(cfg: ExperimentConfig) -> int:
        result = run_energy_transfer(cfg, out)
        console.print(_summary_panel("Transferencia de energía", result.summary,
                                     ("steady_value", "predicted_transfer", "t_half", "t_reached",
                                      "residual", "converged", "excitation_drift")))
        console.print(_files_table("Resultados", result.files))
        return EXIT_OK

    _execute(config, "energy-transfer", print_config, verbose, action)


@app.command()
def state(
    config: str = ConfigOpt,
    out: Optional[Path] = OutOpt,
    print_config: bool = PrintOpt,
    verbose: bool = VerboseOpt,
):
    """
    Transferencia de estados con cuatro qubits

    Ejemplos:
        sim state --config state_transfer
    """
    from flujo.experiments.state import run_state_transfer

    def action(cfg: ExperimentConfig) -> int:
        result = run_state_transfer(cfg, out)
        console.print(_summary_panel("Transferencia de estados", result.summary,
                                     ("steady_value", "fidelity", "fidelity_phase_opt", "phi_opt",
                                      "t_reached", "residual", "converged")))
        console.print(_files_table("Resultados", result.files))
        return EXIT_OK

    _execute(config, "state-transfer", print_config, verbose, action)


@app.command()
def eigen(
    config: str = ConfigOpt,
    out: Optional[Path] = OutOpt,
    print_config: bool = PrintOpt,
    verbose: bool = VerboseOpt,
):
    """Sistema propio vestido y reglas de selección"""
    from flujo.experiments.eigen import run_eigen_report

    def action(cfg: ExperimentConfig) -> int:
        _, selection = run_eigen_report(cfg, out)
        table = Table(title="Reglas de selección", show_header=True, header_style="bold cyan")
        for col in ("pair", "theta", "m23_f", "m34_f", "resonance_detuning", "predicted_transfer", "numeric_ok"):
            table.add_column(col, style="cyan" if col == "pair" else "green")
        for _, row in selection.iterrows():
            table.add_row(*(f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c])
                            for c in ("pair", "theta", "m23_f", "m34_f", "resonance_detuning",
                                      "predicted_transfer", "numeric_ok")))
        console.print(table)
        return EXIT_OK

    _execute(config, None, print_config, verbose, action)


@app.command()
def sweep(
    config: str = ConfigOpt,
    out: Optional[Path] = OutOpt,
    workers: Optional[int] = typer.Option(None, "--workers", "-w", min=1, help="Procesos en paralelo (FLUJO_WORKERS)"),
    print_config: bool = PrintOpt,
    verbose: bool = VerboseOpt,
):
    """
    Barrido de un parámetro del modelo

    Ejemplos:
        sim sweep --config coupling_strength --workers 4
    """
    from flujo.experiments.sweep import run_sweep

    def action(cfg: ExperimentConfig) -> int:
        table = run_sweep(cfg, out, workers or default_workers())
        view = Table(title=f"Barrido {cfg.sweep.axis}", show_header=True, header_style="bold cyan")
        for col in ("sweep_value", "steady_value", "t_half", "t_reached", "residual", "converged", "error"):
            view.add_column(col, style="cyan" if col == "sweep_value" else "green")
        for _, row in table.iterrows():
            view.add_row(*(f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c])
                           for c in ("sweep_value", "steady_value", "t_half", "t_reached",
                                     "residual", "converged", "error")))
        console.print(view)
        failed = int((table["error"] != "").sum())
        if failed:
            console.print(f"[yellow]⚠️ {failed} punto(s) fallaron; ver columna 'error'[/yellow]")
        return EXIT_OK

    _execute(config, "sweep", print_config, verbose, action)


@app.command()
def validate(
    config: str = typer.Option("validate", "--config", "-c", help="Ruta YAML o nombre de preset"),
    out: Optional[Path] = OutOpt,
    print_config: bool = PrintOpt,
    verbose: bool = VerboseOpt,
):
    """Ejecuta las suites de invariantes; sale con 2 si algún check falla"""
    from flujo.experiments.validate import run_validate

    def action(cfg: ExperimentConfig) -> int:
        report = run_validate(cfg, console, out)
        return EXIT_OK if report.passed else EXIT_VALIDATION

    _execute(config, "validate", print_config, verbose, action)


@app.command()
def version():
    """Muestra la versión de FLUJO"""
    console.print(Panel.fit(
        "[bold cyan]FLUJO[/bold cyan]\n"
        "[dim]Transferencia unidireccional por disipación de cavidad[/dim]\n\n"
        f"[bold]Versión:[/bold] {__version__}\n"
        f"[bold]Presets:[/bold] {', '.join(ConfigLoader().list_presets())}",
        border_style="cyan",
    ))


def main():
    app()
