"""
Network Subpackage

Communication digraph, standing-assumption check and coupling matrices.
"""

from __future__ import annotations

from .topology import (
    LEADER,
    CouplingMatrices,
    Digraph,
    Edge,
    build_digraph,
    check_assumption1,
    coupling_matrices,
    default_example_graph,
    leader_broadcast_graph,
)

__all__ = [
    "LEADER",
    "CouplingMatrices",
    "Digraph",
    "Edge",
    "build_digraph",
    "check_assumption1",
    "coupling_matrices",
    "default_example_graph",
    "leader_broadcast_graph",
]
