"""
Communication Topology

Weighted leader-follower digraph over nodes ``0..N`` where node 0 is the
leader.  Provides validation, the standing spanning-tree/undirected-follower
check, and the Laplacian / H matrices that drive every consensus coupling
term in the observer.

Example:
    g = build_digraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
    assert check_assumption1(g)
    h = coupling_matrices(g).h          # [[2, -1], [-1, 1]]
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from .._types import AssumptionCheck, FloatArray
from ..errors import ErrorCode
from ..exceptions import GraphValidationError

logger = logging.getLogger(__name__)

LEADER = 0

# Minimum eigenvalue above which H is declared positive definite.
PD_TOLERANCE: float = 1e-9

# Symmetry tolerance for H.
SYMMETRY_TOLERANCE: float = 1e-12


@dataclass(frozen=True, slots=True)
class Edge:
    """Directed edge ``source -> target``: target receives source's state."""

    source: int
    target: int
    weight: float = 1.0

    def as_list(self) -> list[float]:
        return [self.source, self.target, self.weight]


@dataclass(frozen=True, slots=True)
class CouplingMatrices:
    """Laplacian of the full graph, its follower block H and the leader column.

    ``leader_weights[i, 0]`` is a_{i+1,0}, the weight follower i+1 gives
    the leader, so the neighbor sums are e_v = leader_weights·v − Hη.
    """

    laplacian: FloatArray
    h: FloatArray
    leader_weights: FloatArray

    def disagreement(self, estimates: FloatArray, leader_value: FloatArray) -> FloatArray:
        """Σ_j a_ij (x_j − x_i) with x_0 = ``leader_value``.

        Batched over leading axes of ``estimates`` (…, N, d); ``leader_value``
        broadcasts against (…, d).
        """
        return self.leader_weights * leader_value[..., None, :] - self.h @ estimates

    @property
    def is_symmetric(self) -> bool:
        return bool(np.max(np.abs(self.h - self.h.T), initial=0.0) <= SYMMETRY_TOLERANCE)

    @property
    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the symmetric part of H."""
        if self.h.size == 0:
            return 0.0
        sym = 0.5 * (self.h + self.h.T)
        return float(np.linalg.eigvalsh(sym)[0])

    def is_positive_definite(self, tol: float = PD_TOLERANCE) -> bool:
        return self.is_symmetric and self.min_eigenvalue > tol


@dataclass(frozen=True)
class Digraph:
    """Validated communication graph.

    Immutable after construction; derived structures (networkx view,
    coupling matrices, assumption check) are computed once and cached.

    Attributes:
        node_count: Number of nodes ``N + 1``; node 0 is the leader.
        edges: Directed weighted edges in insertion order.
    """

    node_count: int
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.node_count < 2:
            raise GraphValidationError(
                f"node_count must be >= 2 (one leader, one follower), got {self.node_count}",
                code=ErrorCode.TOO_FEW_NODES,
                location={"node_count": self.node_count},
            )
        seen: set[tuple[int, int]] = set()
        for edge in self.edges:
            _validate_edge(edge, self.node_count)
            pair = (edge.source, edge.target)
            if pair in seen:
                raise GraphValidationError(
                    f"Duplicate edge {edge.source}->{edge.target}",
                    code=ErrorCode.DUPLICATE_EDGE,
                    location={"edge": edge.as_list()},
                    suggestion="Merge parallel edges into one weighted edge",
                )
            seen.add(pair)

    @property
    def follower_count(self) -> int:
        return self.node_count - 1

    def in_neighbors(self, node: int) -> tuple[int, ...]:
        """Neighbor set N̄_i: nodes j with an edge j -> node, sorted."""
        return tuple(sorted(self.graph.predecessors(node)))

    def weight(self, source: int, target: int) -> float:
        data = self.graph.get_edge_data(source, target)
        return 0.0 if data is None else float(data["weight"])

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.node_count))
        g.add_weighted_edges_from((e.source, e.target, e.weight) for e in self.edges)
        return g

    def to_networkx(self) -> nx.DiGraph:
        """Return a copy of the underlying ``networkx.DiGraph``."""
        return self.graph.copy()

    @cached_property
    def coupling(self) -> CouplingMatrices:
        return coupling_matrices(self)

    @cached_property
    def assumption1(self) -> AssumptionCheck:
        return check_assumption1(self)


def _validate_edge(edge: Edge, node_count: int) -> None:
    location = {"edge": edge.as_list()}
    for node in (edge.source, edge.target):
        if not 0 <= node < node_count:
            raise GraphValidationError(
                f"Edge {edge.source}->{edge.target} references node {node} "
                f"outside [0, {node_count - 1}]",
                code=ErrorCode.NODE_OUT_OF_RANGE,
                location=location,
            )
    if edge.source == edge.target:
        raise GraphValidationError(
            f"Self-loop on node {edge.source}",
            code=ErrorCode.SELF_LOOP,
            location=location,
        )
    if not (math.isfinite(edge.weight) and edge.weight > 0):
        raise GraphValidationError(
            f"Edge {edge.source}->{edge.target} has nonpositive weight {edge.weight}",
            code=ErrorCode.NONPOSITIVE_WEIGHT,
            location=location,
            suggestion="Edge weights must be positive finite numbers",
        )


def _coerce_edge(raw: Edge | Sequence[float]) -> Edge:
    if isinstance(raw, Edge):
        return raw
    if len(raw) not in (2, 3):
        raise GraphValidationError(
            f"Edge must be [from, to] or [from, to, weight], got {list(raw)}",
            code=ErrorCode.INVALID_PARAMETER,
            location={"edge": list(raw)},
        )
    source, target = raw[0], raw[1]
    if int(source) != source or int(target) != target:
        raise GraphValidationError(
            f"Edge endpoints must be integers, got {list(raw)}",
            code=ErrorCode.NODE_OUT_OF_RANGE,
            location={"edge": list(raw)},
        )
    weight = float(raw[2]) if len(raw) == 3 else 1.0
    return Edge(int(source), int(target), weight)


def build_digraph(
    node_count: int, edges: Iterable[Edge | Sequence[float]]
) -> Digraph:
    """Validate and build a communication digraph.

    Raises:
        GraphValidationError: On duplicate edges, self-loops, out-of-range
            nodes or nonpositive weights; the error location names the edge.
    """
    return Digraph(node_count=int(node_count), edges=tuple(_coerce_edge(e) for e in edges))


def default_example_graph(followers: int = 6) -> Digraph:
    """Leader feeds follower 1; followers form an undirected unit-weight chain."""
    edges: list[Edge] = [Edge(LEADER, 1)]
    for i in range(1, followers):
        edges.append(Edge(i, i + 1))
        edges.append(Edge(i + 1, i))
    return Digraph(node_count=followers + 1, edges=tuple(edges))


def leader_broadcast_graph(followers: int = 6) -> Digraph:
    """Leader feeds every follower; followers form an undirected unit-weight chain.

    H = I + L_chain, so its smallest eigenvalue is 1 for any chain length.
    """
    edges: list[Edge] = [Edge(LEADER, i) for i in range(1, followers + 1)]
    for i in range(1, followers):
        edges.append(Edge(i, i + 1))
        edges.append(Edge(i + 1, i))
    return Digraph(node_count=followers + 1, edges=tuple(edges))


def check_assumption1(g: Digraph) -> AssumptionCheck:
    """Leader-rooted spanning tree plus undirected follower subgraph.

    Reachability is a breadth-first traversal from node 0.  The follower
    subgraph is undirected iff every follower edge ``i -> j`` (both ends
    followers) has a reverse edge ``j -> i`` of equal weight.  Edges into
    the leader are ignored.
    """
    reached = set(nx.bfs_tree(g.graph, LEADER))
    unreachable = sorted(set(range(1, g.node_count)) - reached)
    if unreachable:
        return AssumptionCheck(
            holds=False,
            diagnostic=f"followers {unreachable} are not reachable from the leader",
            violation=ErrorCode.UNREACHABLE_FOLLOWER,
        )
    for edge in g.edges:
        if LEADER in (edge.source, edge.target):
            continue
        reverse = g.weight(edge.target, edge.source)
        if reverse != edge.weight:
            return AssumptionCheck(
                holds=False,
                diagnostic=(
                    f"follower edge {edge.source}->{edge.target} (weight {edge.weight}) "
                    f"has no reverse edge of equal weight"
                ),
                violation=ErrorCode.DIRECTED_FOLLOWER_EDGE,
            )
    return AssumptionCheck(
        holds=True,
        diagnostic="spanning tree rooted at the leader; follower subgraph undirected",
    )


def coupling_matrices(g: Digraph) -> CouplingMatrices:
    """Laplacian L = D − A (in-degree convention) and its follower block H.

    ``A[i, j]`` is the weight of edge ``j -> i``, so row ``i`` of ``L`` sums
    the disagreement of node ``i`` with the nodes it listens to.
    """
    adjacency = nx.to_numpy_array(
        g.graph, nodelist=range(g.node_count), weight="weight", dtype=float
    ).T
    laplacian = np.diag(adjacency.sum(axis=1)) - adjacency
    h = laplacian[1:, 1:].copy()
    leader_weights = adjacency[1:, :1].copy()
    for arr in (laplacian, h, leader_weights):
        arr.setflags(write=False)
    return CouplingMatrices(laplacian=laplacian, h=h, leader_weights=leader_weights)
