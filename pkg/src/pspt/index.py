"""Per-node partial shortest path trees stored as sorted arrays.

A block for root ``u`` holds the ``beta`` closest surviving nodes of ``u``
(ties broken by node id), each with its distance from ``u`` and the
position, inside the same block, of its first hop back towards ``u``.
All blocks live back to back in three flat arrays (CSR layout).
"""

from __future__ import annotations

import math
import os
import threading
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from .errors import ContractError
from .graph import Graph, PrunedView, prune_degree_one

SENTINEL = int(K.SENTINEL)
TIE_MODES = ("consistent", "arbitrary")

_local = threading.local()


def workspace(graph: Graph, beta: int = 1) -> K.Workspace:
    """Thread-local scratch space for ``graph``."""
    cache = getattr(_local, "cache", None)
    if cache is None:
        cache = _local.cache = weakref.WeakKeyDictionary()
    ws = cache.get(graph)
    if ws is None:
        ws = cache[graph] = K.Workspace(graph.node_count, graph.indices.size, beta)
    ws.ensure_beta(beta)
    return ws


def pspt_size(alpha: float, n: int) -> int:
    """Block size ``ceil(alpha * sqrt(n))`` for a graph of ``n`` nodes (at least 1)."""
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ContractError(f"alpha must be a positive number, got {alpha!r}")
    return max(1, math.ceil(alpha * math.sqrt(n)))


class PsptEntry(NamedTuple):
    member: int
    distance: float
    first_hop_idx: int


@dataclass(frozen=True, eq=False)
class Pspt:
    """One root's block; arrays are views into the owning index."""

    root: int
    members: np.ndarray
    distances: np.ndarray
    first_hop: np.ndarray

    def __len__(self) -> int:
        return int(self.members.size)

    def __iter__(self) -> Iterator[PsptEntry]:
        for m, d, h in zip(self.members.tolist(), self.distances.tolist(), self.first_hop.tolist()):
            yield PsptEntry(m, d, h)

    @property
    def entries(self) -> list[PsptEntry]:
        return list(self)

    def member_set(self) -> set[int]:
        return set(self.members.tolist())

    def position(self, member: int) -> int:
        """Array position of ``member`` or -1."""
        i = int(np.searchsorted(self.members, member))
        if i < self.members.size and self.members[i] == member:
            return i
        return -1

    def distance(self, member: int) -> float:
        i = self.position(member)
        if i < 0:
            raise ContractError(f"{member} is not in the block of {self.root}")
        return float(self.distances[i])


def build_pspt(
    graph: Graph,
    pruned: PrunedView,
    root: int,
    beta: int,
    tie_mode: str = "consistent",
    tie_seed: int = 0,
) -> Pspt:
    """Block of dense node ``root``: its ``beta`` closest nodes inside the pruned graph."""
    if beta < 1:
        raise ContractError("beta must be >= 1")
    if not (0 <= root < graph.node_count) or not pruned.survives[root]:
        raise ContractError(f"dense node {root} does not survive pruning")
    counts, members, dists, hops = _build(
        graph, pruned, np.array([root], dtype=np.int64), beta, tie_mode, tie_seed
    )
    return Pspt(root, members, dists, hops)


def _build(graph, pruned, roots, beta, tie_mode, tie_seed):
    if tie_mode not in TIE_MODES:
        raise ContractError(f"tie_mode must be one of {TIE_MODES}")
    ws = workspace(graph, beta)
    return K.build_blocks(
        graph.indptr, graph.indices, graph.weights, pruned.survives,
        roots, beta, tie_mode == "arbitrary", int(tie_seed) & 0x7FFFFFFFFFFFFFFF,
        ws.dist, ws.parent, ws.state, ws.touched, ws.pos, ws.hd, ws.hk, ws.hv, ws.bound,
    )


@dataclass(eq=False)
class Index:
    """All blocks plus the redirect table and id map; the unit of persistence.

    ``roots`` lists the dense ids that own a block, ascending.  A *complete*
    index has a block for every surviving node; a partial one (built for a
    sample of roots) answers queries only between nodes it covers.
    """

    alpha: float
    beta: int
    ids: np.ndarray
    survives: np.ndarray
    anchor: np.ndarray
    anchor_weight: np.ndarray
    roots: np.ndarray
    offsets: np.ndarray
    members: np.ndarray
    distances: np.ndarray
    first_hop: np.ndarray

    def __post_init__(self) -> None:
        self.block_of = np.full(self.ids.size, -1, dtype=np.int64)
        self.block_of[self.roots] = np.arange(self.roots.size, dtype=np.int64)
        self._block_of_list = self.block_of.tolist()
        self._offsets_list = self.offsets.tolist()
        # plain lists keep per-query lookups off numpy scalars
        self._survives_list = self.survives.tolist()
        self._anchor_list = self.anchor.tolist()
        self._anchor_weight_list = self.anchor_weight.tolist()

    @property
    def node_count(self) -> int:
        return int(self.ids.size)

    @property
    def surviving_count(self) -> int:
        return int(self.survives.sum())

    @property
    def complete(self) -> bool:
        return self.roots.size == self.surviving_count

    @property
    def block_count(self) -> int:
        return int(self.roots.size)

    @property
    def entry_count(self) -> int:
        return int(self.members.size)

    def pruned_view(self) -> PrunedView:
        return PrunedView(self.survives, self.anchor, self.anchor_weight)

    def has_block(self, root: int) -> bool:
        return self._block_of_list[root] >= 0

    def span(self, root: int) -> tuple[int, int]:
        """``(start, stop)`` of ``root``'s block in the flat arrays."""
        b = self._block_of_list[root]
        if b < 0:
            raise ContractError(f"dense node {root} has no block in this index")
        return self._offsets_list[b], self._offsets_list[b + 1]

    def block(self, root: int) -> Pspt:
        lo, hi = self.span(root)
        return Pspt(root, self.members[lo:hi], self.distances[lo:hi], self.first_hop[lo:hi])

    def block_size(self, root: int) -> int:
        lo, hi = self.span(root)
        return hi - lo

    def blocks(self) -> Iterator[Pspt]:
        for r in self.roots.tolist():
            yield self.block(r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Index):
            return NotImplemented
        if self.alpha != other.alpha or self.beta != other.beta:
            return False
        pairs = [
            (self.ids, other.ids), (self.survives, other.survives),
            (self.anchor, other.anchor), (self.roots, other.roots),
            (self.offsets, other.offsets), (self.members, other.members),
            (self.distances, other.distances), (self.first_hop, other.first_hop),
        ]
        if not all(a.shape == b.shape and np.array_equal(a, b) for a, b in pairs):
            return False
        mask = self.anchor >= 0
        return np.array_equal(self.anchor_weight[mask], other.anchor_weight[mask])

    __hash__ = None  # type: ignore[assignment]


def default_threads() -> int:
    env = os.environ.get("PSPT_THREADS")
    if env:
        return max(1, int(env))
    return 1


def build_index(
    graph: Graph,
    alpha: float = 4.0,
    *,
    threads: int | None = None,
    roots: Sequence[int] | np.ndarray | None = None,
    tie_mode: str = "consistent",
    tie_seed: int = 0,
    chunk: int = 2048,
) -> Index:
    """Build the blocks of every surviving node (or of ``roots``, dense ids).

    Roots are built independently, in chunks, on ``threads`` workers; the
    result does not depend on the thread count.
    """
    beta = pspt_size(alpha, graph.node_count)
    pruned = prune_degree_one(graph)
    if roots is None:
        root_arr = np.flatnonzero(pruned.survives).astype(np.int64)
    else:
        root_arr = np.unique(np.asarray(roots, dtype=np.int64))
        if root_arr.size and (root_arr[0] < 0 or root_arr[-1] >= graph.node_count):
            raise ContractError("root out of range")
        root_arr = root_arr[pruned.survives[root_arr]]
    threads = threads or default_threads()

    chunks = [root_arr[i : i + chunk] for i in range(0, root_arr.size, chunk)]

    def run(c):
        return _build(graph, pruned, c, beta, tie_mode, tie_seed)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]

    if parts:
        counts = np.concatenate([p[0] for p in parts])
        members = np.concatenate([p[1] for p in parts])
        dists = np.concatenate([p[2] for p in parts])
        hops = np.concatenate([p[3] for p in parts])
    else:
        counts = np.zeros(0, dtype=np.int64)
        members = np.zeros(0, dtype=np.int64)
        dists = np.zeros(0, dtype=np.float64)
        hops = np.zeros(0, dtype=np.uint32)
    offsets = np.zeros(root_arr.size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return Index(
        alpha=float(alpha),
        beta=beta,
        ids=graph.ids,
        survives=pruned.survives,
        anchor=pruned.anchor,
        anchor_weight=pruned.anchor_weight,
        roots=root_arr,
        offsets=offsets,
        members=members,
        distances=dists,
        first_hop=hops,
    )


def intersect(a: Pspt, b: Pspt) -> list[tuple[int, float, float]]:
    """Common members of two blocks as ``(member, dist_in_a, dist_in_b)``, ascending."""
    members = np.concatenate([a.members, b.members])
    na = a.members.size
    ia, ib = K.merge_intersect(members, 0, na, na, members.size)
    out = []
    for i, j in zip(ia.tolist(), ib.tolist()):
        out.append((int(members[i]), float(a.distances[i]), float(b.distances[j - na])))
    return out
