import pytest

from src.BayesNet.lib import joint_distribution
from src.BayesNet.network import (
    build_network,
    eigenstate_node,
    export_network,
    load_network,
    outcome_node,
    path_probability_from_network,
)
from src.constants import Compressor


class TestNetwork:
    def test_graph_shape(self, rng, scenario_factory):
        scenario = scenario_factory(rng, 3, 2)
        G = build_network(scenario)
        assert G.number_of_nodes() == 3 + 2 * 3
        assert G.number_of_edges() == 3 * 2 * 3
        assert G.nodes[eigenstate_node(0)]["population"] == pytest.approx(
            float(scenario.populations[0])
        )

    def test_outgoing_weights_are_distributions(self, rng, scenario_factory):
        scenario = scenario_factory(rng, 3, 2)
        G = build_network(scenario)
        for s in range(3):
            for n in range(2):
                total = sum(
                    G.edges[eigenstate_node(s), outcome_node(scenario, n, x)]["weight"]
                    for x in range(3)
                )
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_paths_from_graph(self, rng, scenario_factory):
        scenario = scenario_factory(rng, 2, 3)
        G = build_network(scenario)
        dist = joint_distribution(scenario)
        for path in dist.paths():
            assert path_probability_from_network(G, scenario, path) == pytest.approx(
                dist.probability(path), abs=1e-14
            )

    @pytest.mark.parametrize("compressor", [Compressor.LZMA, Compressor.GZIP])
    def test_export_and_reload(self, tmp_path, hadamard, compressor):
        target = export_network(hadamard, "hadamard", compressor, root=tmp_path)
        assert target.exists()
        assert target.name.startswith("hadamard.json")
        G = load_network(target, compressor)
        assert G.graph["fingerprint"] == hadamard.fingerprint
        assert path_probability_from_network(G, hadamard, (0, 1)) == pytest.approx(0.5)
