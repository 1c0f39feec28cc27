"""Random DAG generators: hub, Erdos-Renyi, and Barabasi-Albert."""

from __future__ import annotations

import numpy as np

from qvfdag.common.errors import StructureError
from qvfdag.graph import Dag


def gen_hub(p: int) -> Dag:
    """Node 1 points to every other node."""
    if p < 2:
        raise StructureError(f"a hub graph needs p >= 2, got {p}")
    return Dag.from_edges(p, [(0, j) for j in range(1, p)])


def gen_er(p: int, edge_prob: float, rng: np.random.Generator) -> Dag:
    """Random causal order, then each order-respecting pair joined with probability ``edge_prob``."""
    if p < 2:
        raise StructureError(f"an ER graph needs p >= 2, got {p}")
    if not 0.0 <= edge_prob <= 1.0:
        raise StructureError(f"edge probability must lie in [0, 1], got {edge_prob}")
    order = rng.permutation(p)
    draws = rng.random((p, p))
    edges = [
        (int(order[a]), int(order[b])) for a in range(p) for b in range(a + 1, p) if draws[a, b] < edge_prob
    ]
    return Dag.from_edges(p, edges)


def gen_ba(p: int, attach: int, rng: np.random.Generator) -> Dag:
    """Preferential attachment with (degree + 1) weights, edges oriented old -> new.

    Node v (in arrival order 0..p-1) attaches to ``min(attach, v)`` distinct
    earlier nodes.
    """
    if attach < 1 or p <= attach:
        raise StructureError(f"a BA graph needs p > attach >= 1, got p={p}, attach={attach}")
    degree = np.zeros(p)
    edges: list[tuple[int, int]] = []
    for v in range(1, p):
        weights = degree[:v] + 1.0
        targets = rng.choice(v, size=min(attach, v), replace=False, p=weights / weights.sum())
        for k in sorted(int(t) for t in targets):
            edges.append((k, v))
            degree[k] += 1
            degree[v] += 1
    return Dag.from_edges(p, edges)
