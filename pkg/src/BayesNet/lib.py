import logging
import math
from typing import Iterable, List, Sequence

import numpy as np

from src.BayesNet.models import Path, PathDistribution, Scenario, TimePoint
from src.constants import Method
from src.errors import (
    EmptyKeepSet,
    IncompleteDistribution,
    IndexOutOfRange,
    InitialEvolutionNotAllowed,
    WrongTimeCount,
)
from src.QState.lib import (
    max_norm,
    spectral_decompose,
    validate_basis,
    validate_density,
    validate_unitary,
)
from src.QState.models import (
    DEFAULT_TOLERANCES,
    ComplexOperator,
    DensityMatrix,
    Tolerances,
    Unitary,
)

logger = logging.getLogger(__name__)


def compose_incremental(steps: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Turn per-step unitaries into cumulative ones, U_n = u_n ... u_1 u_0"""
    cumulative: List[np.ndarray] = []
    for step in steps:
        step = np.asarray(step, dtype=np.complex128)
        cumulative.append(step if not cumulative else step @ cumulative[-1])
    return cumulative


def make_time_point(
    label: str,
    unitary: Unitary | ComplexOperator | np.ndarray,
    basis: np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> TimePoint:
    """Validate a unitary and a column basis and bundle them into a TimePoint"""
    if not isinstance(unitary, Unitary):
        unitary = validate_unitary(unitary, tolerances)
    return TimePoint(
        label=label, unitary=unitary, basis=validate_basis(basis, tolerances)
    )


def build_scenario(
    dims: Sequence[int],
    rho: DensityMatrix | ComplexOperator | np.ndarray,
    times: Sequence[TimePoint],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    allow_initial_evolution: bool = False,
) -> Scenario:
    """
    Validate the state, decompose it and assemble the scenario.

    Raises:
        InitialEvolutionNotAllowed: the first unitary is not the identity and the
            override was not given
    """
    if not isinstance(rho, DensityMatrix):
        rho = validate_density(rho, tolerances)
    if not times:
        raise WrongTimeCount("a scenario needs at least one time point")
    first = times[0].unitary.entries
    if not allow_initial_evolution:
        defect = max_norm(first - np.eye(first.shape[0]))
        if defect > tolerances.tol_unitary:
            raise InitialEvolutionNotAllowed(
                f"unitary at {times[0].label} differs from identity by {defect:.3e}"
            )
    scenario = Scenario(
        dims=tuple(int(d) for d in dims),
        rho=rho,
        times=tuple(times),
        decomposition=spectral_decompose(rho, tolerances=tolerances),
        tolerances=tolerances,
    )
    logger.debug(f"Scenario {scenario.fingerprint[:12]} with {scenario.copies} times")
    return scenario


def check_path(scenario: Scenario, path: Sequence[int]) -> Path:
    if len(path) != scenario.copies:
        raise IndexOutOfRange(
            f"path of length {len(path)} for {scenario.copies} time points"
        )
    for x in path:
        if not 0 <= x < scenario.dim:
            raise IndexOutOfRange(f"outcome {x} outside 0..{scenario.dim - 1}")
    return tuple(int(x) for x in path)


def conditional_probability(
    scenario: Scenario, s_index: int, time_index: int, x_index: int
) -> float:
    """p(x_t|s_t) = |<x_t|U_t|s>|^2"""
    for name, index, bound in (
        ("eigenstate", s_index, scenario.dim),
        ("time", time_index, scenario.copies),
        ("outcome", x_index, scenario.dim),
    ):
        if not 0 <= index < bound:
            raise IndexOutOfRange(f"{name} index {index} outside 0..{bound - 1}")
    return float(scenario.conditionals[time_index][x_index, s_index])


def path_probability(scenario: Scenario, path: Sequence[int]) -> float:
    """Sum over eigenstates of P_s times the product of conditionals along the path"""
    path = check_path(scenario, path)
    return math.fsum(
        float(population)
        * math.prod(
            float(scenario.conditionals[n][x, s]) for n, x in enumerate(path)
        )
        for s, population in enumerate(scenario.populations)
    )


def trajectory_weights(scenario: Scenario) -> np.ndarray:
    """P_s * prod_n p(x_n|s_n) indexed [s, x_0, ..., x_N]"""
    scenario.tolerances.check_enumeration(scenario.path_count)
    weights = np.array(scenario.populations, dtype=np.float64)
    for n, conditional in enumerate(scenario.conditionals):
        shape = (scenario.dim,) + (1,) * n + (scenario.dim,)
        weights = weights[..., None] * conditional.T.reshape(shape)
    return weights


def compensated_sum(terms: np.ndarray) -> np.ndarray:
    """Neumaier summation along the first axis"""
    total = np.zeros(terms.shape[1:], dtype=np.float64)
    compensation = np.zeros_like(total)
    for term in terms:
        running = total + term
        compensation += np.where(
            np.abs(total) >= np.abs(term), (total - running) + term, (term - running) + total
        )
        total = running
    return total + compensation


def joint_distribution(scenario: Scenario) -> PathDistribution:
    """
    Complete path table over all dim^(N+1) outcome tuples.

    Raises:
        EnumerationTooLarge: the path count is above the enumeration cap
    """
    scenario.tolerances.check_enumeration(scenario.path_count)
    logger.info(f"Enumerating {scenario.path_count} paths")
    probabilities = compensated_sum(trajectory_weights(scenario))
    return PathDistribution.from_array(
        fingerprint=scenario.fingerprint,
        probabilities=probabilities,
        method=Method.EXACT_EQ1,
        times=range(scenario.copies),
    )


def marginal(dist: PathDistribution, keep_times: Iterable[int]) -> PathDistribution:
    """Sum out every time slot not in `keep_times` (indices into the scenario times)"""
    keep = sorted(set(keep_times))
    if not keep:
        raise EmptyKeepSet("at least one time must be kept")
    if not dist.complete:
        raise IncompleteDistribution("marginals need a complete distribution")
    missing = [t for t in keep if t not in dist.times]
    if missing:
        raise IndexOutOfRange(f"times {missing} are not part of the distribution")
    drop = tuple(axis for axis, t in enumerate(dist.times) if t not in keep)
    probabilities = dist.probabilities.sum(axis=drop) if drop else dist.probabilities
    return PathDistribution.from_array(
        fingerprint=dist.fingerprint,
        probabilities=probabilities,
        method=dist.method,
        times=keep,
        warnings=dist.warnings,
    )


def born_populations(scenario: Scenario, time_index: int) -> np.ndarray:
    """<x|U_t rho U_t^dagger|x> for every x of the given time's basis"""
    if not 0 <= time_index < scenario.copies:
        raise IndexOutOfRange(f"time index {time_index} outside 0..{scenario.steps}")
    time = scenario.times[time_index]
    evolved = time.unitary.entries @ scenario.rho.op.entries @ time.unitary.entries.conj().T
    return np.real(np.diag(time.basis.conj().T @ evolved @ time.basis))


def tpm_distribution(scenario: Scenario) -> PathDistribution:
    """
    Two-projective-measurement statistics: a projective measurement in the t_0 basis
    followed by evolution and a projective measurement in the t_1 basis.

    Raises:
        WrongTimeCount: the scenario does not have exactly two time points
    """
    if scenario.copies != 2:
        raise WrongTimeCount(f"the TPM scheme needs 2 time points, got {scenario.copies}")
    first, second = scenario.times
    initial = born_populations(scenario, 0)
    relative = second.unitary.entries @ first.unitary.entries.conj().T
    transitions = np.abs(second.basis.conj().T @ relative @ first.basis) ** 2
    return PathDistribution.from_array(
        fingerprint=scenario.fingerprint,
        probabilities=initial[:, None] * transitions.T,
        method=Method.TPM,
        times=(0, 1),
    )
