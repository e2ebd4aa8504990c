import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pspt.distributed import (
    ClusterPlan,
    account,
    batch_query,
    read_pairs,
    storage_bound,
    write_results_csv,
)
from pspt.errors import FanInOverflowError
from pspt.generators import preferential_attachment
from pspt.graph import Graph
from pspt.index import build_index
from pspt.query import Resolution, query


@pytest.fixture(scope="module")
def case():
    g = preferential_attachment(1000, 3, seed=5, max_weight=3)
    return g, build_index(g, 4)


def csv_text(run, paths=False):
    buf = io.StringIO()
    write_results_csv(run.results, buf, with_paths=paths)
    return buf.getvalue()


def survivors(ix, g, k, seed):
    rng = np.random.default_rng(seed)
    pool = g.ids[np.flatnonzero(ix.survives)]
    return sorted(rng.choice(pool, size=k, replace=False).tolist())


def test_two_node_set_matches_engine(case):
    g, ix = case
    s, t = survivors(ix, g, 2, 1)
    run = batch_query(ix, g, [s, t], ClusterPlan(3))
    (r,) = run.results
    single = query(ix, g, s, t)
    assert single.resolution is Resolution.INTERSECTION
    assert (r.u, r.v, r.distance, r.meeting_node, r.status) == (s, t, single.distance, single.meeting_node, "ok")


def test_machine_count_does_not_matter(case):
    g, ix = case
    q = survivors(ix, g, 25, 2)
    outs = {p: csv_text(batch_query(ix, g, q, ClusterPlan(p, seed=7), want_paths=True), True) for p in (1, 8)}
    assert outs[1] == outs[8]


def test_arrival_order_does_not_matter(case):
    g, ix = case
    q = survivors(ix, g, 15, 3)
    base = batch_query(ix, g, q, ClusterPlan(4), want_paths=True)
    for seed in range(3):
        other = batch_query(ix, g, q, ClusterPlan(4), want_paths=True, arrival_seed=seed)
        assert csv_text(other, True) == csv_text(base, True)
        assert other.step1_entries == base.step1_entries
        assert other.pair_records == base.pair_records


def test_single_node_query(case):
    g, ix = case
    (u,) = survivors(ix, g, 1, 4)
    run = batch_query(ix, g, [u], ClusterPlan(1))
    assert run.results == []
    assert run.pair_records == 0
    assert run.shuffle_records == ix.block_size(g.dense(u)) == ix.beta


def test_shuffle_equals_block_sizes(case):
    g, ix = case
    q = survivors(ix, g, 20, 6)
    run = batch_query(ix, g, q, ClusterPlan(5))
    assert run.shuffle_records == sum(ix.block_size(g.dense(u)) for u in q)
    assert sum(run.step1_entries) == run.shuffle_records


def test_storage_bound_arithmetic():
    n, alpha = 1000, 4.0
    bounds = [storage_bound(alpha, n, p) for p in (1, 2, 4, 8, 16, 32)]
    assert bounds == sorted(bounds, reverse=True)
    assert storage_bound(4, 100, 1) == 4000


def test_accounting_bound(case):
    g, ix = case
    q = survivors(ix, g, 60, 8)
    for p in (1, 4, 16):
        acc = account(batch_query(ix, g, q, ClusterPlan(p)))
        assert acc.within_storage_bound
        assert acc.max_step1_entries <= storage_bound(ix.alpha, ix.node_count, p)
        assert set(acc.as_row()) >= {"machines", "max_step1_entries", "storage_bound", "shuffle_records"}


def test_pairs_mode_statuses():
    # two triangles joined by a long path; pendant 9 hangs off node 0
    edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 6), (0, 9)]
    src, dst = zip(*edges)
    g = Graph.from_edges(src, dst)
    ix = build_index(g, 0.5)
    run = batch_query(ix, g, [(0, 1), (0, 7), (9, 1), (0, 42), (1, 1)], ClusterPlan(2))
    status = [r.status for r in run.results]
    assert status == ["ok", "no_intersection", "error:non_surviving", "error:unknown_node", "ok"]
    assert run.results[0].distance == query(ix, g, 0, 1).distance
    assert query(ix, g, 0, 7).resolution is Resolution.FALLBACK
    assert run.results[4].distance == 0.0
    text = csv_text(run)
    assert text.splitlines()[0] == "u,v,distance,meeting_node,status"
    assert "no_intersection" in text


def test_partial_index_reports_missing_block():
    g = preferential_attachment(200, 2, seed=1)
    ix = build_index(g, 2, roots=[5, 6, 7])
    run = batch_query(ix, g, [(5, 6), (5, 100)], ClusterPlan(2))
    assert [r.status for r in run.results] == ["ok", "error:no_block"]


def test_fan_in_cap():
    g = preferential_attachment(300, 2, seed=2)
    ix = build_index(g, 4)
    q = g.ids[np.flatnonzero(ix.survives)][:40].tolist()
    with pytest.raises(FanInOverflowError):
        batch_query(ix, g, q, ClusterPlan(2), fan_in_cap=5)


def test_paths_are_valid(case):
    g, ix = case
    q = survivors(ix, g, 12, 9)
    run = batch_query(ix, g, q, ClusterPlan(3), want_paths=True)
    for r in run.results:
        if r.status != "ok":
            continue
        assert r.path[0] == r.u and r.path[-1] == r.v
        assert g.path_length(r.path) == r.distance
        assert r.path == query(ix, g, r.u, r.v).path.nodes


def test_read_pairs():
    assert read_pairs(io.StringIO("# pairs\n1 2\n\n3 4\n")) == [(1, 2), (3, 4)]
    with pytest.raises(ValueError):
        read_pairs(io.StringIO("1 2 3\n"))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**40), st.integers(0, 2**40))
def test_plan_is_deterministic(p, seed, node):
    plan = ClusterPlan(p, seed)
    assert 0 <= plan.machine_of(node) < p
    assert plan.machine_of(node) == ClusterPlan(p, seed).machine_of(node)
    assert plan.machine_of_pair(node, node + 1) == ClusterPlan(p, seed).machine_of_pair(node, node + 1)
