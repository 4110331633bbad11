import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.BayesNet.lib import joint_distribution
from src.errors import DegenerateDenominator
from src.Models.lib import (
    PAIR_PATH,
    QUBIT_PATH,
    adiabatic_phase,
    analytic_pair_pmmp,
    analytic_qubit_populations,
    analytic_qubit_pp,
    bloch_pair_pmmp,
    bloch_qubit_pp,
    coherent_qubit_scenario,
    coherent_qubit_state,
    pair_scenario,
    pair_state,
    partial_swap,
    thermal_qubit,
)
from src.Models.models import CoherentQubitParams, QubitPairParams


def _engine_pp(params: CoherentQubitParams) -> float:
    return joint_distribution(coherent_qubit_scenario(params)).probability(QUBIT_PATH)


def _engine_pmmp(params: QubitPairParams) -> float:
    return joint_distribution(pair_scenario(params)).probability(PAIR_PATH)


def _partition(beta: float) -> float:
    return 2 * math.cosh(beta)


class TestCoherentQubit:
    def test_params(self):
        params = CoherentQubitParams(beta=0.5, a=0.4)
        assert params.b == pytest.approx(-math.tanh(0.5))
        assert params.alpha == pytest.approx(0.4 * math.sqrt(1 - params.b**2) / 2)
        assert params.energies_initial == (1.0, -1.0)
        assert params.energies_final == (2.0, -2.0)

    def test_params_are_validated(self):
        with pytest.raises(ValidationError):
            CoherentQubitParams(beta=0.0)
        with pytest.raises(ValidationError):
            CoherentQubitParams(beta=1.0, a=1.5)

    def test_state(self):
        rho = coherent_qubit_state(CoherentQubitParams(beta=1.0, a=0.5))
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(rho, rho.conj().T)
        # sigma_z expectation is b
        assert (rho[0, 0] - rho[1, 1]).real == pytest.approx(-math.tanh(1.0))

    def test_thermal_qubit(self):
        rho = thermal_qubit(2.0, 0.5)
        assert rho[0, 0].real == pytest.approx(math.exp(-1) / (2 * math.cosh(1)))

    @pytest.mark.parametrize("beta", [0.1, 1.0, 5.0])
    def test_incoherent_limit(self, beta):
        expected = math.exp(-beta) / (2 * math.cosh(beta))
        assert _engine_pp(CoherentQubitParams(beta=beta, a=0.0)) == pytest.approx(
            expected, abs=1e-12
        )

    def test_high_temperature_plateau(self):
        assert _engine_pp(CoherentQubitParams(beta=1e-6, a=0.8)) == pytest.approx(
            0.25, abs=1e-4
        )

    def test_brute_force_sum(self):
        params = CoherentQubitParams(beta=1.0, a=0.5)
        values, vectors = np.linalg.eigh(coherent_qubit_state(params))
        expected = sum(values[s] * abs(vectors[0, s]) ** 4 for s in range(2))
        assert _engine_pp(params) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("a", [-0.9, -0.3, 0.2, 0.6, 1.0])
    @pytest.mark.parametrize("beta", [0.05, 0.7, 3.0])
    def test_bloch_oracle_matches_engine(self, a, beta):
        params = CoherentQubitParams(beta=beta, a=a)
        assert bloch_qubit_pp(params) == pytest.approx(_engine_pp(params), abs=1e-10)

    def test_phase_does_not_change_probabilities(self):
        reference = joint_distribution(
            coherent_qubit_scenario(CoherentQubitParams(beta=1.0, a=0.6))
        )
        for phase in (0.7, math.pi):
            shifted = joint_distribution(
                coherent_qubit_scenario(CoherentQubitParams(beta=1.0, a=0.6, phase=phase))
            )
            assert shifted.max_deviation(reference) <= 1e-12

    def test_adiabatic_phase(self):
        u = adiabatic_phase(0.3)
        np.testing.assert_allclose(u, np.diag([np.exp(-0.3j), np.exp(0.3j)]), atol=1e-14)
        pair = adiabatic_phase(0.3, qubits=2)
        np.testing.assert_allclose(
            np.diag(pair), np.exp(-0.3j * np.array([2, 0, 0, -2])), atol=1e-14
        )

    def test_closed_form_limits(self):
        params = CoherentQubitParams(beta=1.0, a=0.0)
        assert analytic_qubit_pp(params) == pytest.approx(_engine_pp(params), abs=1e-12)
        high, low = analytic_qubit_populations(params)
        assert high == pytest.approx(1 / (1 + math.exp(-2)))
        assert high + low == pytest.approx(1.0)
        hot = CoherentQubitParams(beta=1e-6, a=0.8)
        assert analytic_qubit_pp(hot) == pytest.approx(0.25, abs=1e-5)

    def test_low_temperature(self):
        params = CoherentQubitParams(beta=1000.0, a=0.6)
        assert params.alpha == pytest.approx(0.0, abs=1e-300)
        assert _engine_pp(params) == pytest.approx(0.0, abs=1e-12)
        assert bloch_qubit_pp(params) == pytest.approx(0.0, abs=1e-12)
        assert analytic_qubit_pp(params) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_denominator(self):
        params = CoherentQubitParams(beta=1e-9, a=0.0)
        with pytest.raises(DegenerateDenominator):
            analytic_qubit_pp(params)
        with pytest.raises(DegenerateDenominator):
            bloch_qubit_pp(params)


class TestQubitPair:
    def test_params(self):
        params = QubitPairParams(beta_a=1.0, beta_b=0.5, a=0.3)
        assert params.delta_beta == pytest.approx(0.5)
        assert params.alpha.real == 0
        product = _partition(1.0) * _partition(0.5)
        assert params.alpha.imag == pytest.approx(0.3 / product)
        assert params.inverse_partition == pytest.approx(1 / product)
        assert params.plus_minus == pytest.approx(math.exp(-0.5) / product)
        assert params.minus_plus == pytest.approx(math.exp(0.5) / product)
        gamma = math.exp(1.0) * 1.18 + 1
        assert params.correlation_weight == pytest.approx(
            gamma / (gamma + math.exp(1.0) * (math.exp(1.0) + 1.18))
        )

    def test_correlation_weight_for_colder_b(self):
        params = QubitPairParams(beta_a=0.5, beta_b=1.0, a=0.3)
        shift = math.exp(-1.0)
        gamma = shift * 1.18 + 1
        assert params.correlation_weight == pytest.approx(
            gamma / (gamma + shift * (shift + 1.18))
        )

    def test_partial_swap(self):
        u = partial_swap()
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-14)
        phase = np.exp(1j * math.pi / 4)
        assert u[0, 0] == pytest.approx(phase)
        assert u[3, 3] == pytest.approx(phase)
        # |<-+|U|+->|^2
        assert abs(u[2, 1]) ** 2 == pytest.approx(0.5)

    def test_state(self):
        params = QubitPairParams(beta_a=2.5, beta_b=1.0, a=0.3)
        rho = pair_state(params)
        np.testing.assert_allclose(rho, rho.conj().T)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert rho[1, 2] == pytest.approx(params.alpha)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_uncorrelated_value(self):
        params = QubitPairParams(beta_a=1.0, beta_b=0.5, a=0.0)
        expected = math.exp(-0.5) / (2 * _partition(1.0) * _partition(0.5))
        assert _engine_pmmp(params) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.04357, abs=1e-5)
        assert analytic_pair_pmmp(params) == pytest.approx(expected, abs=1e-12)

    def test_equal_temperatures(self):
        params = QubitPairParams(beta_a=0.8, beta_b=0.8, a=0.0)
        expected = 1 / (2 * _partition(0.8) ** 2)
        assert analytic_pair_pmmp(params) == pytest.approx(expected, abs=1e-14)
        assert _engine_pmmp(params) == pytest.approx(expected, abs=1e-12)

    def test_cold_b(self):
        params = QubitPairParams(beta_a=2.5, beta_b=1000.0, a=0.9)
        expected = 1 / (2 * (1 + math.exp(5.0)))
        assert params.inverse_partition == 0.0
        assert _engine_pmmp(params) == pytest.approx(expected, abs=1e-12)
        assert bloch_pair_pmmp(params) == pytest.approx(expected, abs=1e-12)
        assert analytic_pair_pmmp(params) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("a", [-0.8, 0.0, 0.3, 0.9])
    @pytest.mark.parametrize("beta_b", [0.5, 2.5, 6.0])
    def test_bloch_oracle_matches_engine(self, a, beta_b):
        params = QubitPairParams(beta_a=2.5, beta_b=beta_b, a=a)
        assert bloch_pair_pmmp(params) == pytest.approx(_engine_pmmp(params), abs=1e-10)

    def test_phase_does_not_change_probabilities(self):
        reference = joint_distribution(
            pair_scenario(QubitPairParams(beta_a=2.5, beta_b=1.0, a=0.3))
        )
        for phase in (0.7, math.pi):
            shifted = joint_distribution(
                pair_scenario(QubitPairParams(beta_a=2.5, beta_b=1.0, a=0.3, phase=phase))
            )
            assert shifted.max_deviation(reference) <= 1e-12
