from textwrap import dedent

import numpy as np
import pytest

from src.Cli.loader import load_scenario, parse_scenario
from src.errors import ScenarioParseError, TraceNotOne
from src.QState.models import Tolerances

MATRIX_HEADER = """\
version: 1
rho:
  matrix:
    - [[0.5, 0.0], [0.0, 0.0]]
    - [[0.0, 0.0], [0.5, 0.0]]
"""


class TestScenarioFiles:
    def test_hadamard(self, scenarios_dir):
        loaded = load_scenario(scenarios_dir / "hadamard.yaml")
        assert loaded.scenario.dim == 2
        assert loaded.scenario.copies == 2
        assert not loaded.has_energies
        assert loaded.source.endswith("hadamard.yaml")

    def test_coherent_qubit(self, scenarios_dir):
        loaded = load_scenario(scenarios_dir / "coherent_qubit.yaml")
        assert loaded.energies_initial == (1.0, -1.0)
        assert loaded.energies_final == (2.0, -2.0)
        assert loaded.beta is None

    def test_thermal_qubit(self, scenarios_dir):
        loaded = load_scenario(scenarios_dir / "thermal_qubit.yaml")
        assert loaded.beta == 1.0
        assert loaded.has_energies

    def test_qubit_pair(self, scenarios_dir):
        loaded = load_scenario(scenarios_dir / "qubit_pair.yaml")
        assert loaded.scenario.dim == 4
        assert loaded.energies_initial == (2.0, 0.0, 0.0, -2.0)
        assert loaded.beta is None

    def test_incremental_qutrit(self, scenarios_dir):
        loaded = load_scenario(scenarios_dir / "qutrit_three_times.yaml")
        times = loaded.scenario.times
        assert [t.label for t in times] == ["t0", "t1", "t2"]
        cycle = np.eye(3)[[1, 2, 0]]
        assert np.allclose(times[1].unitary.entries, cycle)
        h = np.array([[1, 1, 0], [1, -1, 0], [0, 0, np.sqrt(2)]]) / np.sqrt(2)
        np.testing.assert_allclose(times[2].unitary.entries, h @ cycle, atol=1e-14)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioParseError):
            load_scenario(tmp_path / "absent.yaml")


class TestParseErrors:
    def test_ragged_row_reports_line(self):
        text = dedent(
            """\
            version: 1
            rho:
              matrix:
                - [[1.0, 0.0], [0.0, 0.0]]
                - [[0.0, 0.0]]
            times:
              - label: t0
            """
        )
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(text)
        assert error.value.line == 5
        assert error.value.field == "rho.matrix.1"

    def test_malformed_yaml(self):
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario("version: 1\nrho: [unclosed\n")
        assert error.value.line is not None

    def test_not_a_mapping(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario("- 1\n- 2\n")

    def test_times_required_for_matrix_states(self):
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(MATRIX_HEADER)
        assert error.value.field == "times"

    def test_unknown_key(self):
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(MATRIX_HEADER + "colour: red\n")
        assert error.value.field == "colour"

    def test_wrong_version(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario(MATRIX_HEADER.replace("version: 1", "version: 2"))

    def test_bad_model_params(self):
        text = dedent(
            """\
            version: 1
            rho:
              model: coherent_qubit
              params: {beta: -1.0}
            """
        )
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(text)
        assert error.value.field == "rho.params.beta"
        assert error.value.line == 4

    def test_dims_must_factor(self):
        text = MATRIX_HEADER + "dims: [2, 2]\ntimes:\n  - label: t0\n"
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(text)
        assert error.value.field == "dims"

    def test_partial_swap_needs_two_qubits(self):
        text = MATRIX_HEADER + "times:\n  - label: t0\n  - label: t1\n    unitary: partial_swap\n"
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(text)
        assert error.value.field == "times.1.unitary"

    def test_unphysical_state(self):
        text = MATRIX_HEADER.replace("[0.5, 0.0]]\n", "[1.5, 0.0]]\n") + "times:\n  - label: t0\n"
        with pytest.raises(TraceNotOne):
            parse_scenario(text)


class TestOptions:
    def test_model_with_explicit_times(self):
        text = dedent(
            """\
            version: 1
            rho:
              model: coherent_qubit
              params: {beta: 1.0, a: 0.4}
            times:
              - label: t0
              - label: t1
                unitary: {adiabatic_phase: 0.7}
                basis: sigma_z_product
            """
        )
        loaded = parse_scenario(text)
        assert loaded.scenario.copies == 2
        assert loaded.scenario.times[1].unitary.entries[0, 0] == pytest.approx(np.exp(-0.7j))

    def test_explicit_energies_and_beta(self):
        text = MATRIX_HEADER + dedent(
            """\
            times:
              - label: t0
              - label: t1
            energies: {initial: [1.0, -1.0], final: [0.5, -0.5]}
            beta: 2.0
            """
        )
        loaded = parse_scenario(text)
        assert loaded.energies_final == (0.5, -0.5)
        assert loaded.beta == 2.0

    def test_tolerance_precedence(self):
        text = MATRIX_HEADER + dedent(
            """\
            times:
              - label: t0
            options:
              tolerances: {tol_herm: 1.0e-6}
            """
        )
        profile = Tolerances(tol_herm=1e-3, tol_trace=1e-4)
        from_file = parse_scenario(text, profile).scenario.tolerances
        assert from_file.tol_herm == 1e-6
        assert from_file.tol_trace == 1e-4
        flagged = parse_scenario(text, profile, {"tol_herm": 1e-2}).scenario.tolerances
        assert flagged.tol_herm == 1e-2

    def test_bad_tolerance(self):
        text = MATRIX_HEADER + dedent(
            """\
            times:
              - label: t0
            options:
              tolerances: {tol_herm: -1.0}
            """
        )
        with pytest.raises(ScenarioParseError) as error:
            parse_scenario(text)
        assert error.value.field == "options.tolerances.tol_herm"
