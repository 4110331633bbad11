import logging
import sys
from functools import wraps
from os import environ
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
import orjson

from src.BayesNet.network import export_network
from src.Cli.loader import load_scenario
from src.Cli.models import LoadedScenario
from src.Cli.writer import (
    write_comparison,
    write_distribution,
    write_figure,
    write_shot_report,
)
from src.constants import (
    DEFAULT_SEED,
    DEFAULT_SHOTS,
    FIG2_A_VALUES,
    FIG2_POINTS,
    FIG2_T_RANGE,
    FIG3_A_VALUES,
    FIG3_POINTS,
    FIG3_T_A,
    FIG3_T_RANGE,
    NETWORK_ROOT,
    ExitCode,
    Figure,
    OutputFormat,
    RouteName,
)
from src.errors import BayesNetError, NotThermalInput, ScenarioParseError
from src.Models.figures import (
    figure2_data,
    figure3_data,
    pair_discrepancy_report,
    qubit_discrepancy_report,
    temperature_grid,
)
from src.Postselection.sampler import expected_acceptance, sample_protocol
from src.Povm.lib import broadcast_report, compare_routes, verify_povm
from src.Povm.models import CheckReport, SkippedReport
from src.Povm.work import bayesian_network_properties, first_law_check, jarzynski_check
from src.utils import (
    _match_compressor,
    _match_route,
    _match_tolerances,
    _match_workers,
)

logger = logging.getLogger(__name__)

TOLERANCE_FLAGS = (
    "tol_herm",
    "tol_trace",
    "tol_psd",
    "tol_unitary",
    "tol_norm",
    "tol_orth",
    "tol_recon",
)


def exits_with_code(command):
    """Turn library errors into their exit codes with the message on stderr"""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BayesNetError as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"{type(e).__name__}: {e}", err=True)
            sys.exit(int(e.exit_code))

    return wrapper


def _workers(workers: Optional[int]) -> Optional[int]:
    return workers if workers is not None else _match_workers(environ.get("WORKERS"))


def _load(file: Path, tol: Optional[float] = None, cap_override: bool = False) -> LoadedScenario:
    flags: Dict[str, Any] = {key: tol for key in TOLERANCE_FLAGS} if tol is not None else {}
    if cap_override:
        flags["cap_override"] = True
    return load_scenario(file, _match_tolerances(), flags)


def _parse_floats(text: str, option: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ScenarioParseError(f"cannot read numbers from {text!r}", field=option) from e


def _parse_energies(text: str) -> Tuple[List[float], List[float]]:
    """'e0,e1;f0,f1' -> initial and final energies"""
    parts = text.split(";")
    if len(parts) != 2:
        raise ScenarioParseError("expected 'initial;final' energy lists", field="--energies")
    return _parse_floats(parts[0], "--energies"), _parse_floats(parts[1], "--energies")


file_argument = click.argument(
    "file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
workers_option = click.option(
    "--workers", type=click.IntRange(min=1), default=None, help="Thread pool size"
)


@click.command()
@file_argument
@click.option(
    "--method",
    type=click.Choice([r.value for r in RouteName]),
    default=RouteName.EQ1.value,
    show_default=True,
    help="Route used to compute the path distribution",
)
@click.option("--compare-all", is_flag=True, help="Run every route and report the spread")
@click.option("--tol", type=float, default=None, help="Override every validation tolerance")
@click.option("--cap-override", is_flag=True, help="Ignore dimension and enumeration caps")
@workers_option
@exits_with_code
def exact(file, method, compare_all, tol, cap_override, workers):
    """Exact path distribution of a scenario file as CSV"""
    loaded = _load(file, tol, cap_override)
    header = {"source": loaded.source}
    if compare_all:
        write_comparison(sys.stdout, compare_routes(loaded.scenario, _workers(workers)), header)
        return
    route = _match_route(method, _workers(workers))
    write_distribution(sys.stdout, route(loaded.scenario), {**header, "route": method})


@click.command()
@file_argument
@click.option("--shots", type=click.IntRange(min=1), default=DEFAULT_SHOTS, show_default=True)
@click.option(
    "--seed", type=click.IntRange(min=0), default=DEFAULT_SEED, show_default=True
)
@workers_option
@exits_with_code
def sample(file, shots, seed, workers):
    """Simulated postselection protocol with stratified estimates as CSV"""
    loaded = _load(file)
    report = sample_protocol(loaded.scenario, shots, seed, _workers(workers))
    write_shot_report(
        sys.stdout,
        report,
        {
            "source": loaded.source,
            "expected_acceptance": repr(expected_acceptance(loaded.scenario)),
        },
    )


def run_checks(
    loaded: LoadedScenario,
    energies: Optional[Tuple[List[float], List[float]]] = None,
    beta: Optional[float] = None,
    workers: Optional[int] = None,
) -> List[CheckReport]:
    """POVM validity, broadcast marginals, and the thermodynamic checks that apply"""
    scenario = loaded.scenario
    reports: List[CheckReport] = [
        verify_povm(scenario, workers),
        broadcast_report(scenario),
    ]
    if energies is None and loaded.has_energies:
        energies = (list(loaded.energies_initial), list(loaded.energies_final))
    beta = beta if beta is not None else loaded.beta

    if energies is None or scenario.copies != 2:
        reason = "no energies given" if energies is None else "needs exactly 2 times"
        reports.append(SkippedReport(check="first_law", note=reason))
        reports.append(SkippedReport(check="jarzynski", note=reason))
        return reports

    initial, final = energies
    reports.append(first_law_check(scenario, initial, final))
    if beta is None:
        reports.append(SkippedReport(check="jarzynski", note="no beta given"))
    else:
        try:
            reports.append(jarzynski_check(scenario, initial, final, beta))
        except NotThermalInput as e:
            reports.append(
                SkippedReport(check="jarzynski", note=f"{NotThermalInput.__name__}: {e}")
            )
    reports.append(bayesian_network_properties(scenario, initial, final, beta, workers))
    return reports


@click.command()
@file_argument
@click.option("--energies", type=str, default=None, help="Energies as 'e0,e1;f0,f1'")
@click.option("--beta", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.TEXT.value,
    show_default=True,
)
@workers_option
@exits_with_code
def check(file, energies, beta, output_format, workers):
    """POVM, first-law and Jarzynski checks; exits 1 when any check fails"""
    loaded = _load(file)
    parsed = _parse_energies(energies) if energies else None
    reports = run_checks(loaded, parsed, beta, _workers(workers))
    if output_format == OutputFormat.JSON:
        click.echo(orjson.dumps([r.model_dump() for r in reports]).decode())
    else:
        click.echo("\n\n".join(r.as_text() for r in reports))
    if not all(r.passed for r in reports):
        sys.exit(int(ExitCode.CHECK_FAILED))


@click.command()
@click.argument("name", type=click.Choice([f.value for f in Figure]))
@click.option("--a", "a_values", type=str, default=None, help="Comma-separated a values")
@click.option("--t-min", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--points", type=click.IntRange(min=1), default=None)
@click.option("--t-a", type=float, default=FIG3_T_A, show_default=True, help="T_A for fig3")
@click.option("--g0", type=float, default=1.0, show_default=True)
@click.option("--g1", type=float, default=2.0, show_default=True)
@click.option("--phase", type=float, default=0.0, show_default=True)
@click.option("--report", is_flag=True, help="Append the closed-form discrepancy report")
@workers_option
@exits_with_code
def figure(name, a_values, t_min, t_max, points, t_a, g0, g1, phase, report, workers):
    """Data behind the temperature sweeps of the two worked examples as CSV"""
    if name == Figure.FIG2:
        (low, high), count, a_default = FIG2_T_RANGE, FIG2_POINTS, FIG2_A_VALUES
    else:
        (low, high), count, a_default = FIG3_T_RANGE, FIG3_POINTS, FIG3_A_VALUES
    try:
        grid = temperature_grid(
            low if t_min is None else t_min,
            high if t_max is None else t_max,
            count if points is None else points,
        )
    except ValueError as e:
        raise ScenarioParseError(str(e), field="--t-min/--t-max/--points") from e
    values = _parse_floats(a_values, "--a") if a_values else list(a_default)

    if name == Figure.FIG2:
        table = figure2_data(grid, values, g0, g1, phase, _workers(workers))
    else:
        table = figure3_data(grid, values, t_a, phase, _workers(workers))
    write_figure(
        sys.stdout,
        table,
        {"points": len(grid), "t_min": grid[0], "t_max": grid[-1], "a": values},
    )
    if table.flagged:
        logger.warning(f"{len(table.flagged)} rows flagged")
    if report:
        discrepancy = (
            qubit_discrepancy_report(table)
            if name == Figure.FIG2
            else pair_discrepancy_report(table)
        )
        for line in discrepancy.as_text().splitlines():
            sys.stdout.write(f"# {line}\n")


@click.command()
@file_argument
@click.option("--output", type=click.Path(path_type=Path), default=None, help="Target file stem")
@click.option(
    "--compressor",
    type=click.Choice(["lzma", "gzip"]),
    default=None,
    help="Defaults to the profile compressor",
)
@exits_with_code
def network(file, output, compressor):
    """Export the eigenstate/outcome graph as compressed node-link json"""
    loaded = _load(file)
    compressor = _match_compressor(compressor or environ.get("COMPRESSOR", "lzma"))
    root, name = (output.parent, output.name) if output else (NETWORK_ROOT, None)
    target = export_network(loaded.scenario, name, compressor, root)
    click.echo(str(target))


commands = [exact, sample, check, figure, network]
