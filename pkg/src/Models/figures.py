import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.BayesNet.lib import joint_distribution, tpm_distribution
from src.BayesNet.models import Scenario
from src.constants import (
    FIG2_A_VALUES,
    FIG2_POINTS,
    FIG2_T_RANGE,
    FIG3_A_VALUES,
    FIG3_POINTS,
    FIG3_T_A,
    FIG3_T_RANGE,
    ORACLE_TOL,
    Figure,
)
from src.errors import DegenerateDenominator, InvalidModelParameters, ValidationFailure
from src.Models.lib import (
    PAIR_PATH,
    QUBIT_PATH,
    analytic_pair_pmmp,
    analytic_qubit_pp,
    analytic_qubit_populations,
    bloch_pair_pmmp,
    bloch_qubit_pp,
    coherent_qubit_scenario,
    pair_scenario,
)
from src.Models.models import (
    CoherentQubitParams,
    DiscrepancyReport,
    FigureRow,
    FigureTable,
    QubitPairParams,
)

logger = logging.getLogger(__name__)

Params = TypeVar("Params", bound=BaseModel)


def temperature_grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    """Logarithmic grid including both ends"""
    if not 0 < t_min <= t_max or points < 1:
        raise ValueError(f"bad temperature grid {t_min}..{t_max} with {points} points")
    return np.geomspace(t_min, t_max, points)


def inverse_temperature(temperature: float, name: str = "T") -> float:
    if not temperature > 0:
        raise InvalidModelParameters(f"{name} must be positive, got {temperature}")
    return 1 / temperature


def model_parameters(model: Type[Params], **fields) -> Params:
    """Build a parameter model, reporting the first rejected field"""
    try:
        return model(**fields)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        raise InvalidModelParameters(f"{where}: {error['msg']}") from e


def _reference(formula: Callable, params) -> Optional[float]:
    try:
        return formula(params)
    except DegenerateDenominator:
        return None


def _row(
    temperature: float,
    a: float,
    build: Callable[[], Tuple[Scenario, object]],
    path: Tuple[int, ...],
    closed_form: Callable,
    oracle: Callable,
) -> FigureRow:
    try:
        scenario, params = build()
    except ValidationFailure as e:
        logger.warning(f"Row T={temperature:.4g}, a={a} flagged: {e}")
        return FigureRow(temperature=temperature, a=a, flag=f"{type(e).__name__}: {e}")
    return FigureRow(
        temperature=temperature,
        a=a,
        engine=joint_distribution(scenario).probability(path),
        tpm=tpm_distribution(scenario).probability(path),
        analytic=_reference(closed_form, params),
        bloch=_reference(oracle, params),
    )


def _evaluate(rows: List[Tuple], row: Callable, workers: Optional[int]) -> List[FigureRow]:
    logger.info(f"Evaluating {len(rows)} grid points")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda args: row(*args), rows))


def figure2_data(
    temperatures: Optional[Sequence[float]] = None,
    a_values: Sequence[float] = FIG2_A_VALUES,
    g0: float = 1.0,
    g1: float = 2.0,
    phase: float = 0.0,
    workers: Optional[int] = None,
) -> FigureTable:
    """P(+,+) of the coherent qubit against temperature, one block of rows per a"""
    if temperatures is None:
        temperatures = temperature_grid(*FIG2_T_RANGE, FIG2_POINTS)

    def row(a: float, temperature: float) -> FigureRow:
        params = model_parameters(
            CoherentQubitParams,
            beta=inverse_temperature(temperature),
            g0=g0,
            g1=g1,
            a=a,
            phase=phase,
        )
        return _row(
            temperature,
            a,
            lambda: (coherent_qubit_scenario(params), params),
            QUBIT_PATH,
            analytic_qubit_pp,
            bloch_qubit_pp,
        )

    grid = list(product([float(a) for a in a_values], [float(t) for t in temperatures]))
    return FigureTable(
        name=Figure.FIG2,
        parameters={"g0": g0, "g1": g1, "phase": phase, "path": "(+,+)"},
        rows=_evaluate(grid, row, workers),
    )


def figure3_data(
    temperatures_b: Optional[Sequence[float]] = None,
    a_values: Sequence[float] = FIG3_A_VALUES,
    t_a: float = FIG3_T_A,
    phase: float = 0.0,
    workers: Optional[int] = None,
) -> FigureTable:
    """P(+-,-+) of the correlated pair against T_B at fixed T_A"""
    if temperatures_b is None:
        temperatures_b = temperature_grid(*FIG3_T_RANGE, FIG3_POINTS)
    beta_a = inverse_temperature(t_a, "T_A")

    def row(a: float, temperature: float) -> FigureRow:
        params = model_parameters(
            QubitPairParams,
            beta_a=beta_a,
            beta_b=inverse_temperature(temperature, "T_B"),
            a=a,
            phase=phase,
        )
        return _row(
            temperature,
            a,
            lambda: (pair_scenario(params), params),
            PAIR_PATH,
            analytic_pair_pmmp,
            bloch_pair_pmmp,
        )

    grid = list(product([float(a) for a in a_values], [float(t) for t in temperatures_b]))
    return FigureTable(
        name=Figure.FIG3,
        parameters={"T_A": t_a, "phase": phase, "path": "(+-,-+)"},
        rows=_evaluate(grid, row, workers),
    )


def _worst(rows: List[FigureRow], column: str) -> Tuple[float, Optional[FigureRow]]:
    gaps = [
        (abs(row.engine - getattr(row, column)), row)
        for row in rows
        if row.engine is not None and getattr(row, column) is not None
    ]
    if not gaps:
        return 0.0, None
    return max(gaps, key=lambda gap: gap[0])


def _discrepancy(table: FigureTable, model: str, **extra) -> DiscrepancyReport:
    rows = [row for row in table.rows if row.flag is None]
    closed_form, worst_row = _worst(rows, "analytic")
    bloch, _ = _worst(rows, "bloch")
    where = (
        f"{table.temperature_column}={worst_row.temperature:.6g}, a={worst_row.a}"
        if worst_row is not None
        else None
    )
    return DiscrepancyReport(
        passed=bloch <= ORACLE_TOL,
        model=model,
        grid_points=len(table.rows),
        flagged_rows=len(table.flagged),
        max_engine_vs_closed_form=closed_form,
        worst_closed_form_at=where,
        max_engine_vs_bloch=bloch,
        **extra,
    )


def qubit_discrepancy_report(table: FigureTable) -> DiscrepancyReport:
    """
    The printed closed form and population formula are compared, not asserted; the
    report passes when the engine agrees with the Bloch oracle.
    """
    g0 = float(table.parameters["g0"])
    population_gap = 0.0
    for row in table.rows:
        if row.flag is not None:
            continue
        params = CoherentQubitParams(beta=1 / row.temperature, g0=g0, a=row.a)
        numerical = coherent_qubit_scenario(params).populations
        printed = np.array(analytic_qubit_populations(params))
        population_gap = max(population_gap, float(np.max(np.abs(numerical - printed))))
    return _discrepancy(table, "coherent_qubit", max_population_gap=population_gap)


def pair_discrepancy_report(table: FigureTable) -> DiscrepancyReport:
    return _discrepancy(table, "qubit_pair")
