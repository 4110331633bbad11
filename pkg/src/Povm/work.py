import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.BayesNet.interfaces import IDistributionRoute
from src.BayesNet.lib import born_populations, joint_distribution
from src.BayesNet.models import Scenario
from src.constants import FIRST_LAW_TOL, JARZYNSKI_TOL, THERMAL_TOL, WORK_BIN_TOL
from src.errors import BadEnergyLength, NotThermalInput, WrongTimeCount
from src.Povm.lib import verify_povm
from src.Povm.models import (
    FirstLawReport,
    JarzynskiReport,
    PropertiesReport,
    WorkDistribution,
)
from src.QState.lib import max_norm

logger = logging.getLogger(__name__)


def _energies(scenario: Scenario, energies: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(energies, dtype=np.float64).ravel()
    if array.shape[0] != scenario.dim:
        raise BadEnergyLength(
            f"{name} energies have {array.shape[0]} entries for dimension {scenario.dim}"
        )
    return array


def _two_times(scenario: Scenario) -> None:
    if scenario.copies != 2:
        raise WrongTimeCount(f"work needs exactly 2 time points, got {scenario.copies}")


def _work_grid(
    scenario: Scenario,
    energies_initial: Sequence[float],
    energies_final: Sequence[float],
    route: IDistributionRoute,
) -> Tuple[np.ndarray, np.ndarray]:
    """Work e1_j - e0_i and probability P(x_i, x_j) for every path, both indexed [i, j]"""
    _two_times(scenario)
    initial = _energies(scenario, energies_initial, "initial")
    final = _energies(scenario, energies_final, "final")
    work = final[None, :] - initial[:, None]
    return work, route(scenario).probabilities


def _cluster(values: np.ndarray, weights: np.ndarray, bin_tol: float) -> Tuple[List[float], List[float]]:
    """Greedy ascending clusters; a cluster keeps its first value as representative"""
    order = np.argsort(values, kind="stable")
    support: List[float] = []
    grouped: List[List[float]] = []
    for index in order:
        value = float(values[index])
        if not support or value - support[-1] > bin_tol:
            support.append(value)
            grouped.append([])
        grouped[-1].append(float(weights[index]))
    return support, [math.fsum(group) for group in grouped]


def work_values(
    scenario: Scenario,
    energies_initial: Sequence[float],
    energies_final: Sequence[float],
    bin_tol: float = WORK_BIN_TOL,
    route: IDistributionRoute = joint_distribution,
) -> WorkDistribution:
    """
    Work distribution P(w) = sum of P(x_i, x_j) over the paths with e1_j - e0_i = w.

    Energies are indexed by the basis of the respective time. Work values closer than
    `bin_tol` to the start of a cluster are merged into it.

    Raises:
        WrongTimeCount: the scenario does not have exactly 2 time points
        BadEnergyLength: an energy list does not have one entry per basis vector
    """
    work, probabilities = _work_grid(scenario, energies_initial, energies_final, route)
    support, probs = _cluster(work.ravel(), probabilities.ravel(), bin_tol)
    total = math.fsum(probs)
    return WorkDistribution(
        support=support, probs=[p / total for p in probs], bin_tol=bin_tol
    )


def energy_change(
    scenario: Scenario, energies_initial: Sequence[float], energies_final: Sequence[float]
) -> float:
    """Tr[H_1 U rho U^dagger] - Tr[H_0 rho] with H_k diagonal in the basis of time k"""
    _two_times(scenario)
    initial = _energies(scenario, energies_initial, "initial")
    final = _energies(scenario, energies_final, "final")
    return math.fsum(final * born_populations(scenario, 1)) - math.fsum(
        initial * born_populations(scenario, 0)
    )


def first_law_check(
    scenario: Scenario,
    energies_initial: Sequence[float],
    energies_final: Sequence[float],
    tolerance: float = FIRST_LAW_TOL,
    route: IDistributionRoute = joint_distribution,
) -> FirstLawReport:
    """Average work against the change in average energy"""
    work, probabilities = _work_grid(scenario, energies_initial, energies_final, route)
    mean_work = math.fsum((work * probabilities).ravel())
    change = energy_change(scenario, energies_initial, energies_final)
    defect = abs(mean_work - change)
    logger.info(f"First law: <w> = {mean_work:.12g}, dE = {change:.12g}")
    return FirstLawReport(
        passed=defect <= tolerance,
        mean_work=mean_work,
        energy_change=change,
        defect=defect,
    )


def _initial_frame(scenario: Scenario) -> np.ndarray:
    """rho as seen at t_0, written in the t_0 basis"""
    first = scenario.times[0]
    transform = first.basis.conj().T @ first.unitary.entries
    return transform @ scenario.rho.op.entries @ transform.conj().T


def thermal_defect(scenario: Scenario, energies_initial: Sequence[float], beta: float) -> float:
    """Max-entry distance between rho in the t_0 basis and the Gibbs state of H_0"""
    initial = _energies(scenario, energies_initial, "initial")
    gibbs = np.exp(-beta * initial - logsumexp(-beta * initial))
    return max_norm(_initial_frame(scenario) - np.diag(gibbs))


def jarzynski_check(
    scenario: Scenario,
    energies_initial: Sequence[float],
    energies_final: Sequence[float],
    beta: float,
    tolerance: float = JARZYNSKI_TOL,
    thermal_tol: float = THERMAL_TOL,
    route: IDistributionRoute = joint_distribution,
) -> JarzynskiReport:
    """
    <exp(-beta w)> against the partition function ratio Z_1/Z_0.

    Raises:
        NotThermalInput: rho is not the Gibbs state of H_0 at beta in the t_0 basis
    """
    _two_times(scenario)
    defect = thermal_defect(scenario, energies_initial, beta)
    if defect > thermal_tol:
        raise NotThermalInput(defect, thermal_tol, "thermal_tol")
    work, probabilities = _work_grid(scenario, energies_initial, energies_final, route)
    average = math.fsum((probabilities * np.exp(-beta * work)).ravel())
    initial = _energies(scenario, energies_initial, "initial")
    final = _energies(scenario, energies_final, "final")
    ratio = float(np.exp(logsumexp(-beta * final) - logsumexp(-beta * initial)))
    relative = abs(average - ratio) / abs(ratio)
    return JarzynskiReport(
        passed=relative <= tolerance,
        beta=beta,
        exponential_average=average,
        partition_ratio=ratio,
        relative_error=relative,
    )


def coherence(scenario: Scenario) -> float:
    """Largest off-diagonal modulus of rho in the t_0 basis"""
    rotated = _initial_frame(scenario)
    return max_norm(rotated - np.diag(np.diag(rotated)))


def bayesian_network_properties(
    scenario: Scenario,
    energies_initial: Sequence[float],
    energies_final: Sequence[float],
    beta: Optional[float] = None,
    workers: Optional[int] = None,
) -> PropertiesReport:
    """
    Measurability (valid POVM), the fluctuation theorem (thermal inputs only) and
    applicability to coherent processes (first law with the actual coherence).
    """
    measurable = verify_povm(scenario, workers).passed
    first_law = first_law_check(scenario, energies_initial, energies_final)
    fluctuation: Optional[bool] = None
    note = None
    if beta is not None:
        try:
            fluctuation = jarzynski_check(
                scenario, energies_initial, energies_final, beta
            ).passed
        except NotThermalInput as error:
            note = f"{NotThermalInput.__name__}: {error}"
    return PropertiesReport(
        passed=measurable and first_law.passed and fluctuation is not False,
        note=note,
        measurable=measurable,
        fluctuation_theorem=fluctuation,
        coherent_process=first_law.passed,
        coherence=coherence(scenario),
    )
