import logging
import math
from typing import Tuple

import numpy as np
import scipy.linalg
from scipy.special import expit

from src.BayesNet.lib import build_scenario, make_time_point
from src.BayesNet.models import Scenario
from src.constants import DENOMINATOR_CUTOFF
from src.errors import DegenerateDenominator, NotPositive, StateNotPositive
from src.Models.models import CoherentQubitParams, QubitPairParams
from src.QState.lib import computational_basis, validate_density
from src.QState.models import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
SWAP = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]

# path (+, +) of the qubit and (+-, -+) of the pair
QUBIT_PATH = (0, 0)
PAIR_PATH = (1, 2)


def thermal_qubit(beta: float, gap: float = 1.0) -> np.ndarray:
    """exp(-beta g sigma_z)/Z; index 0 is the sigma_z = +1 level with energy +g"""
    excited = float(expit(-2 * beta * gap))
    return np.diag([excited, 1 - excited]).astype(np.complex128)


def adiabatic_phase(phi: float, qubits: int = 1) -> np.ndarray:
    """exp(-i phi sum_k sigma_z^(k)), diagonal in the sigma_z product basis"""
    generator = np.zeros((2**qubits, 2**qubits), dtype=np.complex128)
    for k in range(qubits):
        factors = [np.eye(2)] * qubits
        factors[k] = SIGMA_Z
        term = factors[0]
        for factor in factors[1:]:
            term = np.kron(term, factor)
        generator += term
    return scipy.linalg.expm(-1j * phi * generator)


def partial_swap() -> np.ndarray:
    """(I + iS)/sqrt(2)"""
    return (np.eye(4) + 1j * SWAP) / math.sqrt(2)


def _validated(rho: np.ndarray, tolerances: Tolerances, what: str):
    try:
        return validate_density(rho, tolerances)
    except NotPositive as e:
        raise StateNotPositive(f"{what}: {e}") from e


def coherent_qubit_state(p: CoherentQubitParams) -> np.ndarray:
    """[[p_th, alpha], [alpha, 1 - p_th]]"""
    rho = thermal_qubit(p.beta, p.g0)
    rho[0, 1] = rho[1, 0] = p.alpha
    return rho


def coherent_qubit_scenario(
    p: CoherentQubitParams, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Scenario:
    """
    Two-time qubit scenario measured in the sigma_z basis at both times; the
    evolution in between only adds phases in that basis.

    Raises:
        StateNotPositive: the parameters give a negative eigenvalue
    """
    rho = _validated(coherent_qubit_state(p), tolerances, "coherent qubit")
    basis = computational_basis(2)
    times = [
        make_time_point("t0", np.eye(2), basis, tolerances),
        make_time_point("t1", adiabatic_phase(p.phase), basis, tolerances),
    ]
    return build_scenario([2], rho, times, tolerances)


def analytic_qubit_pp(p: CoherentQubitParams) -> float:
    """Printed closed form (1+b)/2 - alpha^2/(4(alpha^2+b^2)) for P(+,+); reference only"""
    denominator = p.alpha**2 + p.b**2
    if denominator < DENOMINATOR_CUTOFF:
        raise DegenerateDenominator(f"alpha^2 + b^2 = {denominator:.3e}")
    return (1 + p.b) / 2 - p.alpha**2 / (4 * denominator)


def bloch_qubit_pp(p: CoherentQubitParams) -> float:
    """
    P(+,+) from the Bloch vector (2 alpha, 0, b) of rho: the eigenstates point along
    +-r/|r| with populations (1 +- |r|)/2, so with c = b/|r| the sum over eigenstates
    is (1 + c^2)/4 + b/2.
    """
    radius_squared = p.b**2 + 4 * p.alpha**2
    if radius_squared < DENOMINATOR_CUTOFF:
        raise DegenerateDenominator(f"Bloch radius squared {radius_squared:.3e}")
    c = p.b / math.sqrt(radius_squared)
    return (1 + c * c) / 4 + p.b / 2


def analytic_qubit_populations(p: CoherentQubitParams) -> Tuple[float, float]:
    """Printed populations (1 +- sqrt(a^2 + b^2))/2; reference only"""
    radical = math.sqrt(p.a**2 + p.b**2)
    return (1 + radical) / 2, (1 - radical) / 2


def pair_state(p: QubitPairParams) -> np.ndarray:
    rho = np.kron(thermal_qubit(p.beta_a), thermal_qubit(p.beta_b))
    # sigma_+ x sigma_- = |+-><-+|
    rho[1, 2] += p.alpha
    rho[2, 1] += np.conj(p.alpha)
    return rho


def pair_scenario(
    p: QubitPairParams, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Scenario:
    """
    Two correlated qubits coupled by a partial swap, measured in the product sigma_z
    basis before and after. A non-zero phase adds exp(-i phi (sz x I + I x sz))
    after the swap.

    Raises:
        StateNotPositive: the parameters give a negative eigenvalue
    """
    rho = _validated(pair_state(p), tolerances, "qubit pair")
    basis = computational_basis(4)
    evolution = adiabatic_phase(p.phase, qubits=2) @ partial_swap()
    times = [
        make_time_point("t0", np.eye(4), basis, tolerances),
        make_time_point("t1", evolution, basis, tolerances),
    ]
    return build_scenario([2, 2], rho, times, tolerances)


def analytic_pair_pmmp(p: QubitPairParams) -> float:
    """Printed closed form for P(+-, -+); reference only"""
    return p.plus_minus / 2 - p.a * p.inverse_partition * p.correlation_weight


def bloch_pair_pmmp(p: QubitPairParams) -> float:
    """
    P(+-, -+) from the 2x2 block of rho on {|+->, |-+>}, m I + z sigma_z - k sigma_y;
    the partial swap acts there as exp(i pi/4 sigma_x).
    """
    m, z = (p.plus_minus + p.minus_plus) / 2, (p.plus_minus - p.minus_plus) / 2
    k = p.a * p.inverse_partition
    radius_squared = z * z + k * k
    # a degenerate block keeps the computational basis
    tilt = z * k / radius_squared if radius_squared >= DENOMINATOR_CUTOFF else 0.0
    return (m * (1 - tilt) + z - k) / 2
