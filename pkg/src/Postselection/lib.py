import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.BayesNet.lib import check_path
from src.BayesNet.models import PathDistribution, Scenario
from src.constants import Method
from src.errors import ZeroPopulationPostselect
from src.QState.lib import tensor
from src.QState.models import ComplexOperator

logger = logging.getLogger(__name__)


def build_measurement_operator(scenario: Scenario, path: Sequence[int]) -> ComplexOperator:
    """M_x = tensor over n of U_n^dagger |x_n><x_n| U_n on the (N+1)-copy space"""
    path = check_path(scenario, path)
    factors = []
    for time, x in zip(scenario.times, path):
        ket = time.unitary.entries.conj().T @ time.basis[:, x]
        factors.append(np.outer(ket, ket.conj()))
    return tensor(factors, scenario.tolerances)


def postselected_state(scenario: Scenario, s_index: int) -> np.ndarray:
    """(tensor_n Pi_s) rho_ind, which factorizes into tensor_n (Pi_s rho)"""
    vector = scenario.decomposition.vector(s_index)
    selected = np.outer(vector, vector.conj()) @ scenario.rho.op.entries
    return tensor([selected] * scenario.copies, scenario.tolerances).entries


def _postselected_terms(
    scenario: Scenario,
    path: Tuple[int, ...],
    measurement: np.ndarray,
    selected_states: Sequence[Optional[np.ndarray]],
) -> Tuple[float, List[int]]:
    """Sum over eigenstates of Tr[M_x (tensor Pi_s) rho_ind] / Tr[Pi_s rho]^N"""
    terms, flagged = [], []
    for s, population in enumerate(scenario.populations):
        population = float(population)
        selected = selected_states[s]
        if selected is None:
            # cancelled form: P_s * prod_n p(x_n|s_n)
            flagged.append(s)
            terms.append(
                population
                * math.prod(
                    float(scenario.conditionals[n][x, s]) for n, x in enumerate(path)
                )
            )
            continue
        numerator = float(np.real(np.einsum("ij,ji->", measurement, selected)))
        terms.append(numerator / population**scenario.steps)
    return math.fsum(terms), flagged


def _selected_states(scenario: Scenario) -> List[Optional[np.ndarray]]:
    cutoff = scenario.tolerances.pop_cutoff
    return [
        None if population < cutoff else postselected_state(scenario, s)
        for s, population in enumerate(scenario.populations)
    ]


def _flag_message(flagged: Sequence[int]) -> str:
    return (
        f"{ZeroPopulationPostselect.__name__}: eigenstates {list(flagged)} fall "
        f"below the population cutoff; cancelled form used"
    )


def postselect_expectation(scenario: Scenario, path: Sequence[int]) -> float:
    """
    Conditional expectation of M_x on postselected independent copies, divided by
    Tr[Pi_s rho]^N so that it equals the path probability for any number of copies.
    Eigenstates with population below the cutoff are evaluated in the cancelled
    form and a ZeroPopulationPostselect warning is emitted.
    """
    path = check_path(scenario, path)
    measurement = build_measurement_operator(scenario, path).entries
    value, flagged = _postselected_terms(
        scenario, path, measurement, _selected_states(scenario)
    )
    if flagged:
        logger.warning(_flag_message(flagged))
        warnings.warn(_flag_message(flagged), ZeroPopulationPostselect, stacklevel=2)
    return value


def postselect_distribution(
    scenario: Scenario, workers: Optional[int] = None
) -> PathDistribution:
    """Complete table of postselected expectations, one path per pool task"""
    scenario.tolerances.check_enumeration(scenario.path_count)
    scenario.tolerances.check_dimension(scenario.dim**scenario.copies)
    selected_states = _selected_states(scenario)

    def evaluate(path: Tuple[int, ...]) -> Tuple[float, List[int]]:
        measurement = build_measurement_operator(scenario, path).entries
        return _postselected_terms(scenario, path, measurement, selected_states)

    paths = list(np.ndindex(*scenario.path_shape))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(evaluate, paths))

    probabilities = np.array([value for value, _ in results]).reshape(scenario.path_shape)
    flagged = sorted({s for _, found in results for s in found})
    notes = (_flag_message(flagged),) if flagged else ()
    for note in notes:
        logger.warning(note)
    return PathDistribution.from_array(
        fingerprint=scenario.fingerprint,
        probabilities=probabilities,
        method=Method.POSTSELECT_EXACT,
        times=range(scenario.copies),
        warnings=notes,
    )
