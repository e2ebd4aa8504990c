"""Distance, path and multi-path queries over an :class:`~pspt.index.Index`."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ContractError
from .graph import Graph
from .index import SENTINEL, Index, Pspt
from .oracle import UNREACHABLE, Path, bidirectional_dense


class Resolution(str, enum.Enum):
    TRIVIAL = "trivial"
    INTERSECTION = "intersection"
    FALLBACK = "fallback"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class QueryOutcome:
    distance: float
    path: Path | None
    resolution: Resolution
    meeting_node: int | None = None

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.distance)


def reconstruct_subpath(block: Pspt, w: int) -> list[int]:
    """Dense node sequence from the block's root to member ``w``."""
    i = block.position(w)
    if i < 0:
        raise ContractError(f"{w} is not in the block of {block.root}")
    members = block.members
    hops = block.first_hop
    seq = [int(members[i])]
    steps = 0
    while True:
        h = int(hops[i])
        if h == SENTINEL:
            break
        i = h
        seq.append(int(members[i]))
        steps += 1
        if steps > members.size:
            raise ContractError("first-hop chain does not reach the root")
    seq.reverse()
    return seq


def _chain(index: Index, lo: int, pos: int) -> list[int]:
    """Members from flat position ``pos`` back to its block's root (w first)."""
    members = index.members
    hops = index.first_hop
    seq = [int(members[pos])]
    h = int(hops[pos])
    while h != SENTINEL:
        pos = lo + h
        seq.append(int(members[pos]))
        h = int(hops[pos])
    return seq


@dataclass(frozen=True)
class _Endpoints:
    s: int
    t: int
    s_red: int
    t_red: int
    s_extra: float
    t_extra: float


def _check(index: Index, graph: Graph) -> None:
    if index.node_count != graph.node_count:
        raise ContractError("index and graph have different node counts")


def _redirect(index: Index, graph: Graph, s: int, t: int) -> QueryOutcome | _Endpoints:
    """Resolve the cases that need no block lookup; otherwise redirect pendant endpoints."""
    ds = graph.dense(s)
    dt = graph.dense(t)
    if ds == dt:
        return QueryOutcome(0.0, Path((s,), 0.0), Resolution.TRIVIAL)
    survives = index._survives_list
    anchor = index._anchor_list
    rs, rt = ds, dt
    ws = wt = 0.0
    if not survives[ds]:
        a = anchor[ds]
        if a < 0:
            return QueryOutcome(UNREACHABLE, None, Resolution.UNREACHABLE)
        if not survives[a]:
            # pair component: the only other reachable node is the partner
            if a == dt:
                w = index._anchor_weight_list[ds]
                return QueryOutcome(w, Path((s, t), w), Resolution.TRIVIAL)
            return QueryOutcome(UNREACHABLE, None, Resolution.UNREACHABLE)
        rs, ws = a, index._anchor_weight_list[ds]
    if not survives[dt]:
        a = anchor[dt]
        if a < 0 or not survives[a]:
            return QueryOutcome(UNREACHABLE, None, Resolution.UNREACHABLE)
        rt, wt = a, index._anchor_weight_list[dt]
    if rs == rt:
        ids = graph.id_list()
        nodes = [s] + ([ids[rs]] if rs != ds and rs != dt else []) + ([t] if dt != ds else [])
        total = ws + wt
        return QueryOutcome(total, Path(tuple(nodes), total), Resolution.TRIVIAL)
    return _Endpoints(ds, dt, rs, rt, ws, wt)


def _wrap(ends: _Endpoints, ids: list[int], core: list[int]) -> tuple[int, ...]:
    nodes = [ids[v] for v in core]
    if ends.s_red != ends.s:
        nodes.insert(0, ids[ends.s])
    if ends.t_red != ends.t:
        nodes.append(ids[ends.t])
    return tuple(nodes)


def query(index: Index, graph: Graph, s: int, t: int, want_path: bool = True) -> QueryOutcome:
    """Shortest ``s``-``t`` distance (and path) between original ids.

    Pendant endpoints are replaced by their anchor, the two blocks are
    merged and the common member with the smallest distance sum becomes the
    meeting node.  When the blocks are disjoint an exact bidirectional
    search on the full graph answers instead.
    """
    _check(index, graph)
    ds = graph.dense(s)
    dt = graph.dense(t)
    buf = np.empty(2 * index.beta + 4, dtype=np.int64)
    code, total, i, plen = K.engine_query(
        index.survives, index.anchor, index.anchor_weight, index.block_of, index.offsets,
        index.members, index.distances, index.first_hop, ds, dt, want_path, buf)
    if code == K.Q_INTERSECTION or code == K.Q_TRIVIAL or code == K.Q_SAME:
        path = None
        if want_path:
            ids = graph.id_list()
            path = Path(tuple([ids[v] for v in buf[:plen].tolist()]), total)
        if code == K.Q_INTERSECTION:
            return QueryOutcome(total, path, Resolution.INTERSECTION, graph.original(int(index.members[i])))
        return QueryOutcome(total, path, Resolution.TRIVIAL)
    if code == K.Q_UNREACHABLE:
        return QueryOutcome(UNREACHABLE, None, Resolution.UNREACHABLE)
    if code == K.Q_NO_BLOCK:
        raise ContractError("endpoint has no block in this index")

    dist, seq = bidirectional_dense(graph, ds, dt)
    if not seq:
        return QueryOutcome(UNREACHABLE, None, Resolution.UNREACHABLE)
    path = Path(tuple(graph.original(v) for v in seq), dist) if want_path else None
    return QueryOutcome(dist, path, Resolution.FALLBACK)


def distance(index: Index, graph: Graph, s: int, t: int) -> float:
    return query(index, graph, s, t, want_path=False).distance


def query_multi(
    index: Index, graph: Graph, s: int, t: int, max_paths: int | None = None
) -> list[Path]:
    """Several simple ``s``-``t`` paths, one per usable meeting node, shortest first.

    Candidates are visited by ascending (distance sum, member id).  A
    candidate already lying on an emitted path is skipped, as is one whose
    two tree paths overlap; every node of an emitted path is marked visited.
    """
    _check(index, graph)
    if max_paths is not None and max_paths < 1:
        return []
    ends = _redirect(index, graph, s, t)
    if isinstance(ends, QueryOutcome):
        return [ends.path] if ends.path is not None else []

    a0, a1 = index.span(ends.s_red)
    b0, b1 = index.span(ends.t_red)
    ia, ib = K.merge_intersect(index.members, a0, a1, b0, b1)
    if ia.size == 0:
        return []
    sums = index.distances[ia] + index.distances[ib]
    order = np.lexsort((index.members[ia], sums))
    ids = graph.id_list()
    visited: set[int] = set()
    out: list[Path] = []
    for k in order.tolist():
        i = int(ia[k])
        w = int(index.members[i])
        if w in visited:
            continue
        left = _chain(index, a0, i)
        left.reverse()
        right = _chain(index, b0, int(ib[k]))
        core = left + right[1:]
        if len(set(core)) != len(core):
            continue
        total = ends.s_extra + float(sums[k]) + ends.t_extra
        out.append(Path(_wrap(ends, ids, core), total))
        visited.update(core)
        if max_paths is not None and len(out) >= max_paths:
            break
    return out
