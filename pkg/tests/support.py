"""Shared graphs and independent oracles for the test suite."""

from __future__ import annotations

import math
import random

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as sp_dijkstra

from pspt.generators import erdos_renyi, preferential_attachment
from pspt.graph import Graph

# Example network with 16 nodes: a core around nodes 1 and 15 and eight pendants.
FIG1_EDGES = [
    (1, 2), (1, 4), (1, 5), (1, 6), (1, 9),
    (15, 5), (15, 6), (15, 9), (15, 10), (10, 9),
    (3, 2), (7, 4), (8, 4), (11, 10), (12, 1), (13, 15), (14, 15), (16, 2),
]
FIG1_PRUNED = {3, 7, 8, 11, 12, 13, 14, 16}
FIG1_ALPHA = 1.25  # ceil(1.25 * 4) = 5


def fig1() -> Graph:
    src, dst = zip(*FIG1_EDGES)
    return Graph.from_edges(src, dst)


# a-b-c and a-d-e-c sharing their ends, a=0 b=1 c=2 d=3 e=4; there is no a-c
# edge, so the two routes from a to c have lengths 2 and 3
TRI_SQUARE = [(0, 1), (1, 2), (0, 3), (3, 4), (4, 2)]


def tri_square() -> Graph:
    src, dst = zip(*TRI_SQUARE)
    return Graph.from_edges(src, dst)


def scipy_matrix(graph: Graph, survives: np.ndarray | None = None) -> csr_matrix:
    n = graph.node_count
    u, v, w = graph.edge_arrays()
    if survives is not None:
        keep = survives[u] & survives[v]
        u, v, w = u[keep], v[keep], w[keep]
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    vals = np.concatenate([w, w])
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def scipy_all_pairs(graph: Graph, survives: np.ndarray | None = None) -> np.ndarray:
    """Dense all-pairs distances (inf when unreachable) from scipy."""
    if graph.node_count == 0:
        return np.zeros((0, 0))
    return sp_dijkstra(scipy_matrix(graph, survives), directed=False)


def bellman_ford(graph: Graph, source: int) -> list[float]:
    """Plain Bellman-Ford over dense ids."""
    n = graph.node_count
    dist = [math.inf] * n
    dist[source] = 0.0
    u, v, w = graph.edge_arrays()
    edges = list(zip(u.tolist(), v.tolist(), w.tolist()))
    for _ in range(n):
        changed = False
        for a, b, x in edges:
            if dist[a] + x < dist[b]:
                dist[b] = dist[a] + x
                changed = True
            if dist[b] + x < dist[a]:
                dist[a] = dist[b] + x
                changed = True
        if not changed:
            break
    return dist


def random_corpus(count: int = 20, seed: int = 2024) -> list[tuple[str, Graph, float]]:
    """Seeded random graphs with n in [50, 200], mixed unit and integer weights.

    Returns ``(label, graph, alpha)``.  Models alternate between sparse
    Erdos-Renyi (several components, many pendants) and preferential
    attachment; alpha is small so blocks are far from covering the graph.
    """
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(50, 200)
        max_weight = 1 if k % 2 == 0 else rng.choice([3, 5, 10])
        alpha = rng.choice([0.5, 1.0, 1.5, 2.0])
        gseed = rng.randrange(1 << 30)
        if k % 3 == 2:
            g = preferential_attachment(n, rng.choice([1, 2, 3]), seed=gseed, max_weight=max_weight)
            label = f"pa n={n}"
        else:
            p = rng.uniform(1.2, 4.0) / n
            g = erdos_renyi(n, p, seed=gseed, max_weight=max_weight)
            label = f"er n={n}"
        out.append((f"{label} w<={max_weight} alpha={alpha}", g, alpha))
    return out
