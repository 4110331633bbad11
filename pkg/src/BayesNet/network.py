from __future__ import annotations

import logging
import math
from importlib import import_module
from pathlib import Path as FilePath
from typing import Optional, Sequence

import networkx as nx
import orjson

from src.BayesNet.lib import check_path
from src.BayesNet.models import Scenario
from src.constants import (
    NETWORK_ROOT,
    Compressor,
    NetworkNode,
    compressor_extensions,
)

logger = logging.getLogger(__name__)


def eigenstate_node(s_index: int) -> str:
    return f"{NetworkNode.EIGENSTATE.value}{s_index}"


def outcome_node(scenario: Scenario, time_index: int, x_index: int) -> str:
    return f"{scenario.times[time_index].label}:{NetworkNode.OUTCOME.value}{x_index}"


def build_network(scenario: Scenario) -> nx.DiGraph:
    """
    Directed graph of the network: each global eigenstate s points at every local
    outcome (t_n, x) with the conditional p(x_n|s_n) as edge weight.
    """
    G = nx.DiGraph(fingerprint=scenario.fingerprint, copies=scenario.copies)
    for s, population in enumerate(scenario.populations):
        G.add_node(
            eigenstate_node(s),
            kind=NetworkNode.EIGENSTATE.value,
            index=s,
            population=float(population),
        )
    for n, conditional in enumerate(scenario.conditionals):
        for x in range(scenario.dim):
            node = outcome_node(scenario, n, x)
            G.add_node(node, kind=NetworkNode.OUTCOME.value, time=n, index=x)
            for s in range(scenario.dim):
                G.add_edge(eigenstate_node(s), node, weight=float(conditional[x, s]))
    return G


def path_probability_from_network(
    G: nx.DiGraph, scenario: Scenario, path: Sequence[int]
) -> float:
    """Evaluate the path probability by walking the graph edges"""
    path = check_path(scenario, path)
    targets = [outcome_node(scenario, n, x) for n, x in enumerate(path)]
    return math.fsum(
        data["population"]
        * math.prod(G.edges[node, target]["weight"] for target in targets)
        for node, data in G.nodes(data=True)
        if data["kind"] == NetworkNode.EIGENSTATE.value
    )


def export_network(
    scenario: Scenario,
    file_name: Optional[str] = None,
    compressor: Compressor = Compressor.LZMA,
    root: FilePath = NETWORK_ROOT,
) -> FilePath:
    """Save the network to disk as compressed node-link json"""
    G = build_network(scenario)
    root.mkdir(parents=True, exist_ok=True)
    compressor_module = import_module(compressor.value)
    target = root / ((file_name or scenario.fingerprint[:16]) + ".json")
    target = target.with_name(target.name + compressor_extensions[compressor.value])
    data = nx.node_link_data(G, edges="edges")
    with compressor_module.open(target, "wb") as f:
        f.write(orjson.dumps(data))
    logger.info(f"Network written to {target.name}")
    return target


def load_network(target: FilePath, compressor: Compressor = Compressor.LZMA) -> nx.DiGraph:
    compressor_module = import_module(compressor.value)
    with compressor_module.open(target, "rb") as compressed:
        return nx.node_link_graph(orjson.loads(compressed.read()), edges="edges")
