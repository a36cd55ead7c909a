from __future__ import annotations

from typing import Any

import networkx as nx

from ribnet.curve.model import SpectralCurveData


def dual_graph(S: SpectralCurveData) -> Any:
    """Components as vertices, one edge per node (loops and parallel edges kept)."""
    G: Any = nx.MultiGraph()
    for c in S.components:
        G.add_node(c.id, self_paired=c.self_paired)
    for k, node in enumerate(S.nodes):
        G.add_edge(node.branch_a.component_id, node.branch_b.component_id, key=k)
    return G


def is_connected(S: SpectralCurveData) -> bool:
    if not S.components:
        return False
    return bool(nx.is_connected(dual_graph(S)))


def arithmetic_genus(S: SpectralCurveData) -> int:
    """Cycle rank of the dual graph: #nodes - #components + #connected pieces.

    For the connected curves accepted by validation this is #nodes - #components + 1.
    """
    G = dual_graph(S)
    pieces = nx.number_connected_components(G) if G.number_of_nodes() else 1
    return int(G.number_of_edges() - G.number_of_nodes() + pieces)
