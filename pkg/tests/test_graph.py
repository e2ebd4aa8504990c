import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pspt.errors import GraphValidationError, ParseError, UnknownNodeError
from pspt.graph import Graph, load_edge_list, prune_degree_one, write_edge_list

from support import FIG1_PRUNED, fig1


def parse(text: str) -> Graph:
    return load_edge_list(io.StringIO(text))


def test_chain_of_two_edges():
    g = parse("1 2\n2 3\n")
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.edge_weight(g.dense(1), g.dense(2)) == 1.0


def test_duplicate_and_reverse_collapse():
    g = parse("5 9 2.5\n9 5 2.5\n# note\n")
    assert g.node_count == 2
    assert g.edge_count == 1
    assert g.edge_weight(g.dense(5), g.dense(9)) == 2.5


def test_duplicate_keeps_minimum():
    g = parse("1 2 3\n1 2 1\n")
    assert g.edge_count == 1
    assert g.edge_weight(0, 1) == 1.0


@pytest.mark.parametrize("text", ["1 2 0\n", "1 2 -3\n", "1 2 nan\n", "1 2 inf\n"])
def test_non_positive_weight_rejected(text):
    with pytest.raises(GraphValidationError):
        parse(text)


@pytest.mark.parametrize("text,lineno", [("1 2\nfoo bar\n", 2), ("1\n", 1), ("1 2 3 4\n", 1), ("1 2 x\n", 1)])
def test_parse_error_carries_line(text, lineno):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.lineno == lineno


def test_self_loop_dropped_but_node_kept(caplog):
    g = parse("4 4\n4 5\n")
    assert g.node_count == 2
    assert g.edge_count == 1
    assert g.self_loops_dropped == 1


def test_unknown_id():
    g = parse("1 2\n")
    with pytest.raises(UnknownNodeError):
        g.dense(7)


def test_adjacency_sorted_by_weight_then_id():
    g = Graph.from_edges([0, 0, 0, 0], [4, 3, 2, 1], [2.0, 1.0, 2.0, 1.0])
    nbr, w = g.neighbors(0)
    assert nbr.tolist() == [1, 3, 2, 4]
    assert w.tolist() == [1.0, 1.0, 2.0, 2.0]


edge_lists = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 30), st.integers(1, 9)), min_size=1, max_size=60
)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_normalization_matches_grouping(edges):
    g = Graph.from_edges([e[0] for e in edges], [e[1] for e in edges], [e[2] for e in edges])
    expect: dict[tuple[int, int], float] = {}
    for a, b, w in edges:
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        expect[key] = min(expect.get(key, math.inf), w)
    u, v, w = g.edge_arrays()
    got = {(int(g.ids[a]), int(g.ids[b])): float(x) for a, b, x in zip(u, v, w)}
    assert got == expect
    assert set(g.ids.tolist()) == {x for e in edges for x in e[:2]}
    assert int(g.degree.sum()) == 2 * g.edge_count


@settings(max_examples=40, deadline=None)
@given(edge_lists)
def test_edge_list_round_trip(edges):
    edges = [e for e in edges if e[0] != e[1]]
    if not edges:
        return
    g = Graph.from_edges([e[0] for e in edges], [e[1] for e in edges], [e[2] for e in edges])
    buf = io.StringIO()
    write_edge_list(g, buf)
    h = parse(buf.getvalue())
    assert np.array_equal(g.ids, h.ids)
    for a, b in zip(g.edge_arrays(), h.edge_arrays()):
        assert np.array_equal(a, b)


def test_fig1_pruned_set():
    g = fig1()
    pv = prune_degree_one(g)
    pruned = {int(g.ids[i]) for i in np.flatnonzero(~pv.survives)}
    assert pruned == FIG1_PRUNED
    node, w = pv.redirect(g.dense(3))
    assert g.original(node) == 2 and w == 1.0


def test_pair_component_redirects_both_ways():
    g = Graph.from_edges([10], [20], [3.0])
    pv = prune_degree_one(g)
    assert not pv.survives.any()
    assert pv.redirect(0) == (1, 3.0)
    assert pv.redirect(1) == (0, 3.0)


def test_star_keeps_only_center():
    g = Graph.from_edges([0] * 5, [1, 2, 3, 4, 5])
    pv = prune_degree_one(g)
    assert pv.survives.tolist() == [True] + [False] * 5
    for leaf in range(1, 6):
        assert pv.redirect(leaf) == (0, 1.0)


def test_path_of_three_keeps_center():
    g = Graph.from_edges([0, 1], [1, 2])
    pv = prune_degree_one(g)
    assert pv.survives.tolist() == [False, True, False]
    assert pv.redirect(0) == (1, 1.0)
    assert pv.redirect(2) == (1, 1.0)
    assert pv.redirect(1) is None


def test_isolated_node_has_no_redirect():
    g = Graph.from_edges([0], [1], nodes=[0, 1, 2])
    pv = prune_degree_one(g)
    assert not pv.survives[2]
    assert pv.redirect(2) is None


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_pruning_is_single_pass(edges):
    g = Graph.from_edges([e[0] for e in edges], [e[1] for e in edges], [e[2] for e in edges])
    pv = prune_degree_one(g)
    deg = g.degree
    for u in range(g.node_count):
        assert bool(pv.survives[u]) == (deg[u] >= 2)
        if deg[u] == 1:
            nbr, w = g.neighbors(u)
            assert pv.redirect(u) == (int(nbr[0]), float(w[0]))
