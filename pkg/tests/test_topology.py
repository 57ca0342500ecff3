"""Tests for the communication digraph, its Laplacian and the spanning-tree check."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_consensus.errors import ErrorCode
from adaptive_consensus.exceptions import GraphValidationError
from adaptive_consensus.network.topology import (
    LEADER,
    Edge,
    build_digraph,
    check_assumption1,
    coupling_matrices,
    default_example_graph,
    leader_broadcast_graph,
)


class TestBuildDigraph:
    """Validation of edges at construction time."""

    def test_accepts_triples_and_pairs(self) -> None:
        g = build_digraph(3, [(0, 1, 2.0), (1, 2)])
        assert g.edges == (Edge(0, 1, 2.0), Edge(1, 2, 1.0))
        assert g.follower_count == 2

    @pytest.mark.parametrize(
        ("edges", "code"),
        [
            ([(1, 1, 1.0)], ErrorCode.SELF_LOOP),
            ([(0, 1, 1.0), (0, 1, 2.0)], ErrorCode.DUPLICATE_EDGE),
            ([(0, 5, 1.0)], ErrorCode.NODE_OUT_OF_RANGE),
            ([(-1, 1, 1.0)], ErrorCode.NODE_OUT_OF_RANGE),
            ([(0, 1, 0.0)], ErrorCode.NONPOSITIVE_WEIGHT),
            ([(0, 1, -1.0)], ErrorCode.NONPOSITIVE_WEIGHT),
            ([(0, 1, float("nan"))], ErrorCode.NONPOSITIVE_WEIGHT),
        ],
    )
    def test_rejects_malformed_edges(
        self, edges: list[tuple[float, ...]], code: ErrorCode
    ) -> None:
        with pytest.raises(GraphValidationError) as exc_info:
            build_digraph(3, edges)
        assert exc_info.value.error_code is code
        assert "edge" in exc_info.value.location

    def test_rejects_single_node(self) -> None:
        with pytest.raises(GraphValidationError) as exc_info:
            build_digraph(1, [])
        assert exc_info.value.error_code is ErrorCode.TOO_FEW_NODES

    def test_in_neighbors_and_weight(self) -> None:
        g = build_digraph(3, [(0, 1, 1.0), (2, 1, 0.5), (1, 2, 0.5)])
        assert g.in_neighbors(1) == (0, 2)
        assert g.in_neighbors(LEADER) == ()
        assert g.weight(2, 1) == 0.5
        assert g.weight(0, 2) == 0.0

    def test_to_networkx_is_a_copy(self) -> None:
        g = default_example_graph(3)
        copy = g.to_networkx()
        copy.remove_edge(0, 1)
        assert g.graph.has_edge(0, 1)


class TestCouplingMatrices:
    """Laplacian and H block."""

    def test_three_node_example(self) -> None:
        g = build_digraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
        coupling = coupling_matrices(g)
        np.testing.assert_array_equal(coupling.h, [[2.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_array_equal(coupling.laplacian[0], [0.0, 0.0, 0.0])
        assert coupling.is_positive_definite()

    def test_laplacian_rows_sum_to_zero(self) -> None:
        coupling = default_example_graph(6).coupling
        np.testing.assert_allclose(coupling.laplacian.sum(axis=1), 0.0)

    def test_matrices_are_read_only(self) -> None:
        coupling = default_example_graph(2).coupling
        with pytest.raises(ValueError):
            coupling.h[0, 0] = 5.0
        with pytest.raises(ValueError):
            coupling.leader_weights[0, 0] = 5.0

    def test_leader_weights_and_disagreement(self) -> None:
        g = build_digraph(3, [(0, 1, 2.0), (1, 2, 1.0), (2, 1, 1.0)])
        coupling = g.coupling
        np.testing.assert_array_equal(coupling.leader_weights, [[2.0], [0.0]])
        eta = np.array([[1.0, 0.0], [0.0, 3.0]])
        v = np.array([2.0, 1.0])
        # Follower 1: 2·(v − η1) + (η2 − η1); follower 2: η1 − η2.
        np.testing.assert_array_equal(
            coupling.disagreement(eta, v), [[1.0, 5.0], [1.0, -3.0]]
        )

    def test_leader_broadcast_graph(self) -> None:
        coupling = leader_broadcast_graph(6).coupling
        np.testing.assert_array_equal(coupling.leader_weights, np.ones((6, 1)))
        assert coupling.min_eigenvalue == pytest.approx(1.0, abs=1e-12)
        assert check_assumption1(leader_broadcast_graph(6))


class TestAssumption1:
    """Spanning tree rooted at the leader plus undirected follower subgraph."""

    def test_example_graph_holds(self) -> None:
        g = default_example_graph(6)
        check = check_assumption1(g)
        assert check
        assert check.violation is None
        assert g.coupling.is_positive_definite()

    def test_missing_root_edge(self) -> None:
        g = build_digraph(3, [(1, 2, 1.0), (2, 1, 1.0)])
        check = check_assumption1(g)
        assert not check
        assert check.violation is ErrorCode.UNREACHABLE_FOLLOWER
        assert not g.coupling.is_positive_definite()

    def test_directed_follower_edge(self) -> None:
        g = build_digraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        check = check_assumption1(g)
        assert not check
        assert check.violation is ErrorCode.DIRECTED_FOLLOWER_EDGE

    def test_edge_into_leader_is_ignored(self) -> None:
        g = build_digraph(3, [(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0), (2, 1, 1.0)])
        assert check_assumption1(g)

    def test_asymmetric_weights(self) -> None:
        g = build_digraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 1, 2.0)])
        assert check_assumption1(g).violation is ErrorCode.DIRECTED_FOLLOWER_EDGE

    def test_to_dict(self) -> None:
        data = check_assumption1(default_example_graph(2)).to_dict()
        assert data["holds"] is True


@st.composite
def _rooted_undirected_graphs(draw: st.DrawFn) -> tuple[int, list[tuple[int, int, float]]]:
    followers = draw(st.integers(min_value=1, max_value=7))
    weight = st.floats(min_value=0.1, max_value=5.0, allow_nan=False)
    edges: list[tuple[int, int, float]] = []
    # Random spanning tree: each follower attaches to an earlier node.
    for node in range(1, followers + 1):
        parent = draw(st.integers(min_value=0, max_value=node - 1))
        w = draw(weight)
        edges.append((parent, node, w))
        if parent != LEADER:
            edges.append((node, parent, w))
    return followers + 1, edges


class TestAssumption1Properties:
    """Random graphs satisfying the assumption give a positive definite H."""

    @given(_rooted_undirected_graphs())
    @settings(max_examples=100, deadline=None)
    def test_h_positive_definite(
        self, graph: tuple[int, list[tuple[int, int, float]]]
    ) -> None:
        g = build_digraph(*graph)
        assert check_assumption1(g)
        coupling = g.coupling
        assert coupling.is_symmetric
        assert coupling.is_positive_definite()
