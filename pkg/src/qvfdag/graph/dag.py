"""Directed acyclic graphs and their topological-layer decomposition.

Nodes are 0-based contiguous integers everywhere inside the package; files and
human-facing output use 1-based ids (see ``qvfdag.common.io``).
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from qvfdag.common.errors import CycleError, StructureError


def _digraph(p: int, edges: Iterable[tuple[int, int]]) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(p))
    graph.add_edges_from(edges)
    return graph


def is_acyclic(edges: Iterable[tuple[int, int]], p: int) -> bool:
    """Return True iff a topological order covers all ``p`` nodes."""
    return bool(nx.is_directed_acyclic_graph(_digraph(p, edges)))


@dataclass(frozen=True)
class Dag:
    """Node count plus a set of directed edges ``(k, j)`` meaning k -> j."""

    p: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.p < 1:
            raise StructureError(f"node count must be positive, got {self.p}")
        object.__setattr__(self, "edges", frozenset((int(k), int(j)) for k, j in self.edges))
        for k, j in self.edges:
            if not (0 <= k < self.p and 0 <= j < self.p):
                raise StructureError(f"edge {k + 1}->{j + 1} references a node outside 1..{self.p}")
            if k == j:
                raise StructureError(f"self-loop on node {k + 1}")
        graph = _digraph(self.p, self.edges)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            back = (int(cycle[-1][0]), int(cycle[-1][1]))
            raise CycleError(f"directed cycle detected; back edge {back[0] + 1}->{back[1] + 1}", edge=back)

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[tuple[int, int]]) -> Dag:
        edge_list = [(int(k), int(j)) for k, j in edges]
        if len(set(edge_list)) != len(edge_list):
            raise StructureError("duplicate edges in edge list")
        return cls(p=p, edges=frozenset(edge_list))

    def parents(self, j: int) -> frozenset[int]:
        """Return {k : (k, j) in edges}."""
        if not 0 <= j < self.p:
            raise StructureError(f"node {j + 1} outside 1..{self.p}")
        return self._parent_map[j]

    @cached_property
    def _parent_map(self) -> tuple[frozenset[int], ...]:
        parents: list[set[int]] = [set() for _ in range(self.p)]
        for k, j in self.edges:
            parents[j].add(k)
        return tuple(frozenset(s) for s in parents)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_networkx(self) -> nx.DiGraph:
        return _digraph(self.p, self.edges)

    def topological_order(self) -> list[int]:
        """Deterministic topological order (smallest available node first)."""
        return [int(v) for v in nx.lexicographical_topological_sort(self.to_networkx())]

    def relabel(self, permutation: list[int]) -> Dag:
        """Return the graph with node ``v`` renamed ``permutation[v]``."""
        return Dag(p=self.p, edges=frozenset((permutation[k], permutation[j]) for k, j in self.edges))


@dataclass(frozen=True)
class TopologicalLayers:
    """Ordered partition A_0, ..., A_{T-1} of the nodes."""

    layers: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(frozenset(int(v) for v in layer) for layer in self.layers))
        seen: set[int] = set()
        for layer in self.layers:
            if not layer:
                raise StructureError("topological layers must be nonempty")
            if seen & layer:
                raise StructureError(f"node(s) {sorted(v + 1 for v in seen & layer)} appear in two layers")
            seen |= layer
        if seen != set(range(len(seen))):
            raise StructureError("layers must cover nodes 1..p exactly")

    @property
    def T(self) -> int:  # noqa: N802
        return len(self.layers)

    @property
    def p(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @cached_property
    def index(self) -> dict[int, int]:
        """Map node -> layer index."""
        return {v: t for t, layer in enumerate(self.layers) for v in layer}

    def upper(self, t: int) -> frozenset[int]:
        """Return S_t = A_0 | ... | A_{t-1}."""
        return frozenset().union(*self.layers[:t])

    def to_json(self) -> list[list[int]]:
        """JSON array of arrays with 1-based node ids."""
        return [sorted(v + 1 for v in layer) for layer in self.layers]

    @classmethod
    def from_json(cls, payload: list[list[int]]) -> TopologicalLayers:
        return cls(layers=tuple(frozenset(v - 1 for v in layer) for layer in payload))


def layers_of(dag: Dag) -> TopologicalLayers:
    """Assign every node to the layer given by its longest path from a root.

    Dynamic programming over a topological order; roots and isolated nodes land
    in layer 0.
    """
    depth: dict[int, int] = {}
    for v in dag.topological_order():
        preds = dag.parents(v)
        depth[v] = max((depth[k] for k in preds), default=-1) + 1
    n_layers = max(depth.values()) + 1
    buckets: list[set[int]] = [set() for _ in range(n_layers)]
    for v, t in depth.items():
        buckets[t].add(v)
    return TopologicalLayers(layers=tuple(frozenset(b) for b in buckets))


def parents(dag: Dag, j: int) -> frozenset[int]:
    return dag.parents(j)
