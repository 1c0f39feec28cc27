"""Tests for qvfdag.graph: DAG validation and topological layers."""

import pytest

from qvfdag.common.errors import CycleError, StructureError
from qvfdag.graph import Dag, TopologicalLayers, is_acyclic, layers_of


class TestDag:
    def test_parents(self):
        """Parents are the sources of incoming edges."""
        dag = Dag.from_edges(4, [(0, 2), (1, 2), (2, 3)])
        assert dag.parents(2) == {0, 1}
        assert dag.parents(0) == frozenset()

    def test_cycle_rejected(self):
        """A cycle is reported with one of its edges."""
        with pytest.raises(CycleError) as exc:
            Dag.from_edges(3, [(0, 1), (1, 2), (2, 0)])
        assert exc.value.edge in {(0, 1), (1, 2), (2, 0)}

    def test_self_loop_rejected(self):
        """Self-loops are rejected."""
        with pytest.raises(StructureError, match="self-loop"):
            Dag.from_edges(2, [(1, 1)])

    def test_duplicate_rejected(self):
        """Repeated edges are rejected."""
        with pytest.raises(StructureError, match="duplicate"):
            Dag.from_edges(2, [(0, 1), (0, 1)])

    def test_out_of_range_rejected(self):
        """Edges must stay within 0..p-1."""
        with pytest.raises(StructureError, match="outside"):
            Dag.from_edges(2, [(0, 2)])

    def test_parents_of_unknown_node(self):
        with pytest.raises(StructureError):
            Dag(p=2).parents(5)

    def test_topological_order_is_deterministic(self):
        """Ties are broken by the smallest node id."""
        dag = Dag.from_edges(3, [(2, 0)])
        assert dag.topological_order() == [1, 2, 0]

    def test_relabel(self):
        dag = Dag.from_edges(3, [(0, 1)]).relabel([2, 0, 1])
        assert dag.edges == {(2, 0)}

    def test_is_acyclic(self):
        assert is_acyclic([(0, 1), (1, 2)], 3)
        assert not is_acyclic([(0, 1), (1, 0)], 2)


class TestLayers:
    def test_chain_with_isolated_node(self):
        """Isolated nodes sit in the first layer."""
        layers = layers_of(Dag.from_edges(4, [(0, 1), (1, 2)]))
        assert layers.to_json() == [[1, 4], [2], [3]]
        assert layers.T == 3
        assert layers.p == 4

    def test_longest_path_decides_layer(self):
        """A node's layer is its longest path from a root."""
        # 1 -> 3 directly and through 2, so 3 sits below 2.
        layers = layers_of(Dag.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
        assert layers.to_json() == [[1], [2], [3]]

    def test_edges_point_downward(self):
        """Every edge goes from a lower to a higher layer index."""
        dag = Dag.from_edges(6, [(0, 3), (1, 3), (3, 4), (2, 5), (4, 5)])
        layers = layers_of(dag)
        assert all(layers.index[k] < layers.index[j] for k, j in dag.edges)
        assert layers.layers[0] == {0, 1, 2}

    def test_empty_graph_single_layer(self):
        """No edges, one layer."""
        assert layers_of(Dag(p=3)).to_json() == [[1, 2, 3]]

    def test_upper(self):
        """upper(t) is the union of layers above t."""
        layers = TopologicalLayers.from_json([[1, 4], [2], [3]])
        assert layers.upper(0) == frozenset()
        assert layers.upper(2) == {0, 1, 3}

    def test_rejects_overlap(self):
        """A node may belong to only one layer."""
        with pytest.raises(StructureError, match="two layers"):
            TopologicalLayers(layers=(frozenset({0, 1}), frozenset({1})))

    def test_rejects_gap(self):
        """Layers must cover 0..p-1."""
        with pytest.raises(StructureError, match="cover"):
            TopologicalLayers(layers=(frozenset({0}), frozenset({2})))

    def test_rejects_empty_layer(self):
        """Empty layers are rejected."""
        with pytest.raises(StructureError, match="nonempty"):
            TopologicalLayers(layers=(frozenset({0}), frozenset()))
