import logging
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from itertools import combinations, product
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.BayesNet.lib import check_path, joint_distribution
from src.BayesNet.models import PathDistribution, Scenario
from src.constants import POVM_POSITIVITY_TOL, POVM_TOL, Method, RouteName
from src.errors import CopyCountMismatch
from src.Postselection.lib import build_measurement_operator, postselect_distribution
from src.Povm.models import (
    BroadcastReport,
    BroadcastState,
    PovmElement,
    PovmReport,
    RouteComparison,
)
from src.QState.lib import max_norm, partial_trace, tensor, validate_density
from src.QState.models import ComplexOperator

logger = logging.getLogger(__name__)


def _resolve_copies(scenario: Scenario, copies: Optional[int]) -> int:
    copies = scenario.copies if copies is None else copies
    if copies != scenario.copies:
        raise CopyCountMismatch(
            f"{copies} copies requested for a scenario with {scenario.copies} times"
        )
    scenario.tolerances.check_dimension(scenario.dim**copies)
    return copies


def _repeated(vector: np.ndarray, copies: int) -> np.ndarray:
    """|s s ... s>"""
    return reduce(np.kron, [vector] * copies)


def broadcast_state(scenario: Scenario, copies: Optional[int] = None) -> BroadcastState:
    """sum_s P_s |s...s><s...s|, a correlated state whose single-copy marginals are rho"""
    copies = _resolve_copies(scenario, copies)
    vectors = scenario.decomposition.eigenvectors
    columns = np.column_stack(
        [_repeated(vectors[:, s], copies) for s in range(scenario.dim)]
    )
    state = (columns * scenario.populations) @ columns.conj().T
    return BroadcastState(
        copies=copies, state=validate_density(state, scenario.tolerances)
    )


def broadcast_marginal_defects(scenario: Scenario, broadcast: BroadcastState) -> List[float]:
    """Max-entry distance between rho and the partial trace onto each copy"""
    dims = [scenario.dim] * broadcast.copies
    return [
        partial_trace(broadcast.state.op, dims, keep).max_abs_diff(scenario.rho.op)
        for keep in range(broadcast.copies)
    ]


def broadcast_report(scenario: Scenario, tolerance: float = 1e-10) -> BroadcastReport:
    broadcast = broadcast_state(scenario)
    worst = max(broadcast_marginal_defects(scenario, broadcast))
    return BroadcastReport(
        passed=worst <= tolerance, copies=broadcast.copies, max_marginal_defect=worst
    )


def kraus_stack(scenario: Scenario, copies: Optional[int] = None) -> np.ndarray:
    """
    Kraus operators E_i = sum_r |r r ... r><r i_1 ... i_N| stacked along the first
    axis, one per collective index i in lexicographic order.
    """
    copies = _resolve_copies(scenario, copies)
    vectors = scenario.decomposition.eigenvectors
    dim = scenario.dim
    targets = [_repeated(vectors[:, r], copies) for r in range(dim)]
    operators = []
    for index in product(range(dim), repeat=copies - 1):
        tail = reduce(np.kron, [vectors[:, i] for i in index], np.ones(1))
        operators.append(
            sum(
                np.outer(targets[r], np.kron(vectors[:, r], tail).conj())
                for r in range(dim)
            )
        )
    return np.stack(operators)


def broadcast_kraus(scenario: Scenario, copies: Optional[int] = None) -> List[ComplexOperator]:
    return [ComplexOperator(entries=e) for e in kraus_stack(scenario, copies)]


def apply_channel(
    kraus: Sequence[ComplexOperator] | np.ndarray, op: ComplexOperator | np.ndarray
) -> ComplexOperator:
    """sum_i E_i X E_i^dagger"""
    stack = (
        np.stack([e.entries for e in kraus]) if not isinstance(kraus, np.ndarray) else kraus
    )
    entries = op.entries if isinstance(op, ComplexOperator) else np.asarray(op)
    return ComplexOperator(
        entries=np.einsum("kab,bc,kdc->ad", stack, entries, stack.conj(), optimize=True)
    )


def _pull_back(stack: np.ndarray, measurement: np.ndarray) -> np.ndarray:
    """sum_i E_i^dagger M E_i"""
    return np.einsum("kba,bc,kcd->ad", stack.conj(), measurement, stack, optimize=True)


def _min_eigenvalue(op: np.ndarray) -> float:
    return float(scipy.linalg.eigvalsh((op + op.conj().T) / 2)[0])


def povm_element(
    scenario: Scenario, path: Sequence[int], kraus: Optional[np.ndarray] = None
) -> PovmElement:
    """J_x = sum_i E_i^dagger M_x E_i; Tr[J_x (tensor_n rho)] is the path probability"""
    path = check_path(scenario, path)
    stack = kraus_stack(scenario) if kraus is None else kraus
    measurement = build_measurement_operator(scenario, path).entries
    element = _pull_back(stack, measurement)
    return PovmElement(
        path=path,
        op=ComplexOperator(entries=element),
        min_eigenvalue=_min_eigenvalue(element),
    )


def _paths(scenario: Scenario) -> List[Tuple[int, ...]]:
    scenario.tolerances.check_enumeration(scenario.path_count)
    return list(np.ndindex(*scenario.path_shape))


def povm_elements(scenario: Scenario, workers: Optional[int] = None) -> List[PovmElement]:
    """Every J_x in lexicographic path order"""
    paths = _paths(scenario)
    stack = kraus_stack(scenario)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda path: povm_element(scenario, path, stack), paths))


def verify_povm(
    scenario: Scenario,
    workers: Optional[int] = None,
    tolerance: float = POVM_TOL,
    positivity_tolerance: float = POVM_POSITIVITY_TOL,
) -> PovmReport:
    """Completeness sum_x J_x = 1 and positivity of every element"""
    elements = povm_elements(scenario, workers)
    total = sum(element.op.entries for element in elements)
    defect = max_norm(total - np.eye(total.shape[0]))
    lowest = min(element.min_eigenvalue for element in elements)
    logger.info(f"POVM completeness defect {defect:.3e}, min eigenvalue {lowest:.3e}")
    return PovmReport(
        passed=defect <= tolerance and lowest >= -positivity_tolerance,
        paths=len(elements),
        completeness_defect=defect,
        min_eigenvalue=lowest,
    )


def _expectation_table(
    scenario: Scenario,
    evaluate: Callable[[Tuple[int, ...]], float],
    method: Method,
    workers: Optional[int],
) -> PathDistribution:
    paths = _paths(scenario)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        values = list(pool.map(evaluate, paths))
    return PathDistribution.from_array(
        fingerprint=scenario.fingerprint,
        probabilities=np.array(values, dtype=np.float64).reshape(scenario.path_shape),
        method=method,
        times=range(scenario.copies),
    )


def _trace_product(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.einsum("ij,ji->", a, b)))


def distribution_via_broadcast(
    scenario: Scenario, workers: Optional[int] = None
) -> PathDistribution:
    """Tr[M_x rho_bro] for every path"""
    state = broadcast_state(scenario).state.op.entries

    def evaluate(path: Tuple[int, ...]) -> float:
        return _trace_product(build_measurement_operator(scenario, path).entries, state)

    return _expectation_table(scenario, evaluate, Method.BROADCAST, workers)


def distribution_via_povm(
    scenario: Scenario, workers: Optional[int] = None
) -> PathDistribution:
    """Tr[J_x (tensor_n rho)] for every path"""
    independent = tensor([scenario.rho.op] * scenario.copies, scenario.tolerances).entries
    stack = kraus_stack(scenario)

    def evaluate(path: Tuple[int, ...]) -> float:
        element = _pull_back(stack, build_measurement_operator(scenario, path).entries)
        return _trace_product(element, independent)

    return _expectation_table(scenario, evaluate, Method.POVM, workers)


def compare_routes(scenario: Scenario, workers: Optional[int] = None) -> RouteComparison:
    """Run the direct sum, postselection, broadcast and POVM routes side by side"""
    distributions = {
        RouteName.EQ1.value: joint_distribution(scenario),
        RouteName.POSTSELECT.value: postselect_distribution(scenario, workers),
        RouteName.BROADCAST.value: distribution_via_broadcast(scenario, workers),
        RouteName.POVM.value: distribution_via_povm(scenario, workers),
    }
    deviation, pair = max(
        (distributions[a].max_deviation(distributions[b]), (a, b))
        for a, b in combinations(distributions, 2)
    )
    logger.info(f"Largest route disagreement {deviation:.3e} between {pair}")
    return RouteComparison(
        distributions=distributions, max_pairwise_deviation=deviation, worst_pair=pair
    )
