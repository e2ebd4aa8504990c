import math

import networkx as nx
import numpy as np
import pytest

from pspt.errors import ContractError
from pspt.generators import erdos_renyi, grid
from pspt.graph import Graph
from pspt.oracle import (
    UNREACHABLE,
    all_pairs_paths,
    bidirectional_search,
    dijkstra,
    intersects_along_sp,
)

from support import bellman_ford, fig1


def test_single_node():
    g = Graph.from_edges([], [], nodes=[4])
    dm = dijkstra(g, 4)
    assert dm.distance(4) == 0.0
    assert dm.path_to(4).nodes == (4,)


def test_unit_path():
    g = Graph.from_edges([0, 1], [1, 2])
    dm = dijkstra(g, 0)
    assert [dm.distance(v) for v in (0, 1, 2)] == [0, 1, 2]
    assert dm.path_to(2).nodes == (0, 1, 2)


def test_against_bellman_ford():
    g = erdos_renyi(100, 0.05, seed=7, max_weight=20)
    for s in range(0, 100, 9):
        dm = dijkstra(g, s)
        bf = bellman_ford(g, g.dense(s))
        assert dm.dist.tolist() == bf
        for v in range(100):
            p = dm.path_to(v)
            if math.isfinite(bf[v]):
                assert g.path_length(p.nodes) == bf[v]
            else:
                assert p is None


def test_restricted_to_survivors():
    g = fig1()
    dm = dijkstra(g, 1, restrict_to_survivors=True)
    assert dm.distance(3) == UNREACHABLE
    assert dm.distance(15) == 2.0
    with pytest.raises(ContractError):
        dijkstra(g, 3, restrict_to_survivors=True)


def test_bidirectional_trivial_and_disconnected():
    g = Graph.from_edges([0, 2], [1, 3])
    d, path = bidirectional_search(g, 1, 1)
    assert d == 0.0 and path.nodes == (1,)
    assert bidirectional_search(g, 0, 3) == (UNREACHABLE, None)


def test_bidirectional_matches_dijkstra_on_1000_pairs():
    g = erdos_renyi(1000, 0.004, seed=3, max_weight=10)
    rng = np.random.default_rng(0)
    sources = {}
    for s, t in rng.integers(0, 1000, size=(1000, 2)).tolist():
        if s not in sources:
            sources[s] = dijkstra(g, s)
        d, path = bidirectional_search(g, s, t)
        assert d == sources[s].distance(t)
        if math.isfinite(d):
            assert path.nodes[0] == s and path.nodes[-1] == t
            assert g.path_length(path.nodes) == d


def test_bidirectional_against_networkx_on_grid():
    g = grid(12, 12, seed=1, max_weight=4)
    nxg = nx.Graph()
    for a, b, w in zip(*g.edge_arrays()):
        nxg.add_edge(int(a), int(b), weight=float(w))
    lengths = dict(nx.all_pairs_dijkstra_path_length(nxg))
    for s in range(0, 144, 13):
        for t in range(0, 144, 7):
            assert bidirectional_search(g, s, t)[0] == lengths[s][t]


def test_all_pairs_triangle_and_guard():
    g = Graph.from_edges([0, 1, 2], [1, 2, 0])
    ap = all_pairs_paths(g)
    assert all(ap.distance(a, b) == (0 if a == b else 1) for a in range(3) for b in range(3))
    with pytest.raises(ContractError):
        all_pairs_paths(erdos_renyi(30, 0.1), max_n=20)


def test_all_pairs_fig1_and_random():
    assert all_pairs_paths(fig1()).distance(3, 1) == 2.0
    g = erdos_renyi(50, 0.08, seed=4, max_weight=6)
    ap = all_pairs_paths(g)
    for s in range(50):
        assert ap.dist[s].tolist() == dijkstra(g, s).dist.tolist()


def test_on_shortest_path_symmetric_with_endpoints():
    g = erdos_renyi(40, 0.1, seed=9)
    ap = all_pairs_paths(g)
    for s in range(0, 40, 3):
        for t in range(0, 40, 5):
            a = ap.on_shortest_path(s, t)
            assert a == ap.on_shortest_path(t, s)
            if math.isfinite(ap.distance(s, t)):
                assert {s, t} <= a


def test_along_sp_predicate():
    # square 0-1-2-3-0 with a chord 0-2 of weight 3: d(0,2) = 2 through 1 or 3
    g = Graph.from_edges([0, 1, 2, 3, 0], [1, 2, 3, 0, 2], [1, 1, 1, 1, 3])
    ap = all_pairs_paths(g)
    ds, dt = ap.dist[0], ap.dist[2]
    common = np.array([1])
    assert intersects_along_sp(common, ds[common], dt[common], ds, dt, 2.0)
    # a stored distance that disagrees with the oracle does not count
    assert not intersects_along_sp(common, ds[common] + 1, dt[common], ds, dt, 2.0)
    assert not intersects_along_sp(np.array([], dtype=np.int64), ds[:0], dt[:0], ds, dt, 2.0)
