"""Exact shortest paths: the query fallback and the reference for everything else."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ContractError
from .graph import Graph, PrunedView, prune_degree_one
from .index import workspace

UNREACHABLE = math.inf


@dataclass(frozen=True)
class Path:
    """Node sequence (original ids) from source to target and its length."""

    nodes: tuple[int, ...]
    length: float

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class DistanceMap:
    """Single-source result indexed by dense id; ``inf`` marks unreachable."""

    graph: Graph
    source: int
    dist: np.ndarray
    parent: np.ndarray

    def distance(self, node: int) -> float:
        return float(self.dist[self.graph.dense(node)])

    def path_to(self, node: int) -> Path | None:
        v = self.graph.dense(node)
        if not math.isfinite(self.dist[v]):
            return None
        seq = []
        while v != -1:
            seq.append(self.graph.original(v))
            v = int(self.parent[v])
        return Path(tuple(reversed(seq)), float(self.dist[self.graph.dense(node)]))


def _sssp(graph: Graph, source: int, survives: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    ws = workspace(graph)
    mask = survives if survives is not None else np.ones(graph.node_count, dtype=bool)
    return K.full_dijkstra(
        graph.indptr, graph.indices, graph.weights, mask, survives is not None,
        source, ws.hd, ws.hk, ws.hv,
    )


def dijkstra(
    graph: Graph,
    source: int,
    restrict_to_survivors: bool = False,
    pruned: PrunedView | None = None,
) -> DistanceMap:
    """Exact distances from original id ``source``, settling in (distance, id) order.

    With ``restrict_to_survivors`` the search stays inside the pruned graph
    (the source itself must survive).
    """
    s = graph.dense(source)
    survives = None
    if restrict_to_survivors:
        survives = (pruned or prune_degree_one(graph)).survives
        if not survives[s]:
            raise ContractError(f"{source} does not survive pruning")
    dist, parent = _sssp(graph, s, survives)
    return DistanceMap(graph, source, dist, parent)


def dense_distances(graph: Graph, source: int, survives: np.ndarray | None = None) -> np.ndarray:
    """Distance array from dense ``source`` (restricted to ``survives`` if given)."""
    return _sssp(graph, source, survives)[0]


def bidirectional_dense(graph: Graph, s: int, t: int) -> tuple[float, list[int]]:
    """Bidirectional Dijkstra on dense ids; ``(inf, [])`` when disconnected."""
    if s == t:
        return 0.0, [s]
    ws = workspace(graph)
    dist, plen = K.bidirectional(
        graph.indptr, graph.indices, graph.weights, s, t,
        ws.dist, ws.dist_b, ws.parent, ws.parent_b, ws.done_f, ws.done_b, ws.touched,
        ws.hd, ws.hk, ws.hv, ws.hd_b, ws.hk_b, ws.hv_b, ws.path,
    )
    return dist, ws.path[:plen].tolist()


def bidirectional_search(graph: Graph, s: int, t: int) -> tuple[float, Path | None]:
    """Exact ``s``-``t`` distance and one shortest path, searching from both ends."""
    dist, seq = bidirectional_dense(graph, graph.dense(s), graph.dense(t))
    if not seq:
        return UNREACHABLE, None
    ids = graph.id_list()
    return dist, Path(tuple(ids[v] for v in seq), dist)


@dataclass(frozen=True, eq=False)
class AllPairs:
    """Dense all-pairs distance table."""

    graph: Graph
    dist: np.ndarray

    def distance(self, s: int, t: int) -> float:
        return float(self.dist[self.graph.dense(s), self.graph.dense(t)])

    def on_shortest_path_dense(self, s: int, t: int) -> np.ndarray:
        """Dense ids lying on at least one shortest ``s``-``t`` path."""
        d = self.dist[s, t]
        if not math.isfinite(d):
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(self.dist[s] + self.dist[t] == d)

    def on_shortest_path(self, s: int, t: int) -> frozenset[int]:
        g = self.graph
        hits = self.on_shortest_path_dense(g.dense(s), g.dense(t))
        return frozenset(g.ids[hits].tolist())


def all_pairs_paths(graph: Graph, max_n: int = 500) -> AllPairs:
    """All-pairs distances by repeated Dijkstra; refuses graphs above ``max_n`` nodes."""
    n = graph.node_count
    if n > max_n:
        raise ContractError(f"all-pairs table limited to {max_n} nodes, graph has {n}")
    table = np.empty((n, n), dtype=np.float64)
    for s in range(n):
        table[s] = dense_distances(graph, s)
    return AllPairs(graph, table)


def max_incident_weight(graph: Graph, survives: np.ndarray) -> np.ndarray:
    """Per dense node, heaviest edge to a surviving neighbor (0 if none)."""
    out = np.zeros(graph.node_count, dtype=np.float64)
    rows = np.repeat(np.arange(graph.node_count), graph.degree)
    keep = survives[rows] & survives[graph.indices]
    np.maximum.at(out, rows[keep], graph.weights[keep])
    return out


def intersects_along_sp(
    common: np.ndarray,
    block_dist_s: np.ndarray,
    block_dist_t: np.ndarray,
    dist_s: np.ndarray,
    dist_t: np.ndarray,
    st_distance: float,
    offset_s: float = 0.0,
    offset_t: float = 0.0,
) -> bool:
    """True when some common member lies on a shortest path with exact stored distances.

    ``common`` holds dense ids present in both blocks, ``block_dist_*`` their
    stored distances, ``dist_*`` full oracle distance arrays from the two
    (unredirected) endpoints and ``offset_*`` the redirect weights added on
    each side.
    """
    if common.size == 0 or not math.isfinite(st_distance):
        return False
    ds = dist_s[common]
    dt = dist_t[common]
    ok = (
        (ds + dt == st_distance)
        & (block_dist_s + offset_s == ds)
        & (block_dist_t + offset_t == dt)
    )
    return bool(ok.any())
