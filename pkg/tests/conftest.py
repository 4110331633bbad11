import numpy as np
import pytest
from scipy.stats import unitary_group

from src.BayesNet.lib import build_scenario, make_time_point
from src.QState.lib import computational_basis


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Full-rank random state G G^dagger / Tr"""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_scenario(rng: np.random.Generator, dim: int, copies: int):
    times = [make_time_point("t0", np.eye(dim), random_unitary(rng, dim))]
    for n in range(1, copies):
        times.append(
            make_time_point(f"t{n}", random_unitary(rng, dim), random_unitary(rng, dim))
        )
    return build_scenario([dim], random_density(rng, dim), times)


def hadamard_scenario():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rho = np.diag([1.0, 0.0])
    basis = computational_basis(2)
    times = [
        make_time_point("t0", np.eye(2), basis),
        make_time_point("t1", h, basis),
    ]
    return build_scenario([2], rho, times)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def scenario_factory():
    return random_scenario


@pytest.fixture
def hadamard():
    return hadamard_scenario()


@pytest.fixture
def random_suite():
    """d in {2, 3, 4} with 2 or 3 times, seventeen scenarios of each shape"""
    rng = np.random.default_rng(7)
    return [
        random_scenario(rng, dim, copies)
        for dim in (2, 3, 4)
        for copies in (2, 3)
        for _ in range(17)
    ]


@pytest.fixture
def scenarios_dir(request):
    return request.config.rootpath / "scenarios"
