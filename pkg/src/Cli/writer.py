import csv
from typing import Any, List, Mapping, Optional, TextIO

from src.BayesNet.models import PathDistribution
from src.constants import CODE_VERSION
from src.Models.models import FigureTable
from src.Postselection.models import ShotReport
from src.Povm.models import RouteComparison


def write_header(stream: TextIO, items: Mapping[str, Any]) -> None:
    """`# key: value` lines ahead of the csv body"""
    stream.write(f"# code_version: {CODE_VERSION}\n")
    for key, value in items.items():
        stream.write(f"# {key}: {value}\n")


def _path_columns(copies: int) -> List[str]:
    return [f"x{n}" for n in range(copies)]


def write_distribution(
    stream: TextIO,
    dist: PathDistribution,
    header: Optional[Mapping[str, Any]] = None,
) -> None:
    write_header(
        stream,
        {
            **(header or {}),
            "method": dist.method.value,
            "fingerprint": dist.fingerprint,
            "total": repr(dist.total),
            "complete": dist.complete,
            **{f"warning_{k}": w for k, w in enumerate(dist.warnings)},
        },
    )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*_path_columns(len(dist.times)), "probability"])
    clamped = dist.clamped()
    for path in dist.paths():
        writer.writerow([*path, repr(float(clamped[path]))])


def write_comparison(
    stream: TextIO,
    comparison: RouteComparison,
    header: Optional[Mapping[str, Any]] = None,
) -> None:
    names = list(comparison.distributions)
    first = comparison.distributions[names[0]]
    write_header(
        stream,
        {
            **(header or {}),
            "fingerprint": first.fingerprint,
            "max_pairwise_deviation": repr(comparison.max_pairwise_deviation),
            "worst_pair": "/".join(comparison.worst_pair),
        },
    )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*_path_columns(len(first.times)), *names])
    for path in first.paths():
        writer.writerow(
            [*path, *(repr(comparison.distributions[n].probability(path)) for n in names)]
        )


def write_shot_report(
    stream: TextIO,
    report: ShotReport,
    header: Optional[Mapping[str, Any]] = None,
) -> None:
    write_header(
        stream,
        {
            **(header or {}),
            "fingerprint": report.fingerprint,
            "seed": report.seed,
            "shots": report.shots_requested,
            "accepted": report.accepted,
            "acceptance_rate": repr(report.acceptance_rate),
            "flags": ",".join(report.flags) or "none",
        },
    )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        [*_path_columns(report.counts.ndim), "count", "estimate", "std_error"]
    )
    for path in report.paths():
        writer.writerow(
            [
                *path,
                int(report.counts[path]),
                repr(float(report.estimates[path])),
                repr(float(report.std_errors[path])),
            ]
        )


def _cell(value: Any) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_figure(
    stream: TextIO,
    table: FigureTable,
    header: Optional[Mapping[str, Any]] = None,
) -> None:
    write_header(stream, {**(header or {}), "figure": table.name.value, **table.parameters})
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([table.temperature_column, "a", "engine", "tpm", "analytic", "bloch", "flag"])
    for row in table.rows:
        writer.writerow(
            [
                _cell(value)
                for value in (
                    row.temperature,
                    row.a,
                    row.engine,
                    row.tpm,
                    row.analytic,
                    row.bloch,
                    row.flag,
                )
            ]
        )
