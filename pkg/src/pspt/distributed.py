"""In-process simulation of batch queries as map / shuffle / reduce rounds.

Step 1 (map, round 1): each machine emits ``<w; (u, d(u, w))>`` for every
member ``w`` of the block of every queried node ``u`` it owns.
Step 2 (reduce, round 1): the machine owning key ``w`` pairs the values it
received and emits ``<(u, v); d(u, w) + d(v, w)>``.
Step 3 (reduce, round 2, behind an identity map): the machine owning pair
``(u, v)`` keeps the minimum.

Machines are logical partitions run one after another; every inbox is
sorted canonically before it is reduced, so results and counters do not
depend on the machine count or on processing order.
"""

from __future__ import annotations

import csv
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple, Sequence

from .errors import FanInOverflowError, UnknownNodeError
from .graph import Graph
from .index import Index
from .query import _chain

_MASK = (1 << 64) - 1

EMIT_RECORD_BYTES = 24  # key u64, source u64, distance f64
PAIR_RECORD_BYTES = 32  # u u64, v u64, distance f64, meeting node u64
PATH_NODE_BYTES = 8


def _splitmix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


@dataclass(frozen=True)
class ClusterPlan:
    """Deterministic assignment of node keys and pair keys to ``machines``."""

    machines: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.machines < 1:
            raise ValueError("need at least one machine")

    def machine_of(self, node: int) -> int:
        return _splitmix(_splitmix(self.seed) ^ node) % self.machines

    def machine_of_pair(self, u: int, v: int) -> int:
        return _splitmix(_splitmix(self.seed ^ u) ^ (v * 0x632BE59BD9B4E019 & _MASK)) % self.machines


class EmitRecord(NamedTuple):
    key: int
    source: int
    distance: float
    subpath: tuple[int, ...] | None = None


class PairRecord(NamedTuple):
    key: tuple[int, int]
    distance: float
    meeting_node: int
    path: tuple[int, ...] | None = None


@dataclass
class BatchResult:
    u: int
    v: int | None
    distance: float | None
    meeting_node: int | None
    status: str
    path: tuple[int, ...] | None = None


@dataclass
class BatchRun:
    plan: ClusterPlan
    alpha: float
    node_count: int
    results: list[BatchResult]
    step1_entries: list[int]
    resident_entries: list[int]
    shuffle_records: int
    shuffle_bytes_round1: int
    pair_records: int
    shuffle_bytes_round2: int
    fan_in: dict[int, int] = field(repr=False)
    pair_keys_per_machine: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class Accounting:
    machines: int
    max_step1_entries: int
    storage_bound: int
    max_resident_entries: int
    shuffle_records: int
    pair_records: int
    shuffle_bytes: int
    max_fan_in: int
    max_pair_keys: int

    @property
    def within_storage_bound(self) -> bool:
        return self.max_step1_entries <= self.storage_bound

    def as_row(self) -> dict[str, object]:
        return {
            "machines": self.machines,
            "max_step1_entries": self.max_step1_entries,
            "storage_bound": self.storage_bound,
            "within_bound": int(self.within_storage_bound),
            "max_resident_entries": self.max_resident_entries,
            "shuffle_records": self.shuffle_records,
            "pair_records": self.pair_records,
            "shuffle_bytes": self.shuffle_bytes,
            "max_fan_in": self.max_fan_in,
            "max_pair_keys": self.max_pair_keys,
        }


def storage_bound(alpha: float, n: int, machines: int) -> int:
    return math.ceil(alpha * n * math.sqrt(n) / machines)


def _is_pair(item) -> bool:
    return isinstance(item, (tuple, list)) and len(item) == 2


def batch_query(
    index: Index,
    graph: Graph,
    queries: Iterable,
    plan: ClusterPlan,
    want_paths: bool = False,
    fan_in_cap: int = 10_000,
    arrival_seed: int | None = None,
) -> BatchRun:
    """Run the three steps for a node set (all pairs) or a list of ``(u, v)`` pairs.

    Ids are original ids.  Queried nodes must survive pruning; others get a
    per-query error row.  ``arrival_seed`` shuffles machine order and record
    arrival order, which must not change anything.
    """
    items = list(queries)
    if not items:
        raise ValueError("empty query set")
    pair_mode = _is_pair(items[0])
    ids = graph.id_list()
    errors: dict[int, str] = {}

    def resolve(x) -> int | None:
        try:
            d = graph.dense(x)
        except UnknownNodeError:
            errors[x] = "error:unknown_node"
            return None
        if not index.survives[d]:
            errors[x] = "error:non_surviving"
            return None
        if not index.has_block(d):
            errors[x] = "error:no_block"
            return None
        return d

    partners: dict[int, set[int]] | None
    if pair_mode:
        requested = [(x, y) for x, y in items]
        dense_pairs = [(resolve(x), resolve(y)) for x, y in requested]
        partners = defaultdict(set)
        for a, b in dense_pairs:
            if a is not None and b is not None and a != b:
                partners[a].add(b)
                partners[b].add(a)
        nodes = sorted({d for p in dense_pairs for d in p if d is not None})
    else:
        nodes = sorted({d for d in (resolve(x) for x in items) if d is not None})
        partners = None

    p = plan.machines
    rng = random.Random(arrival_seed) if arrival_seed is not None else None
    machine_order = list(range(p))
    if rng is not None:
        rng.shuffle(machine_order)

    # step 1: map
    owned: list[list[int]] = [[] for _ in range(p)]
    for u in nodes:
        owned[plan.machine_of(u)].append(u)
    resident = [0] * p
    for r in index.roots.tolist():
        resident[plan.machine_of(r)] += index.block_size(r)

    step1 = [0] * p
    inbox: list[list[EmitRecord]] = [[] for _ in range(p)]
    shuffle_records = 0
    bytes1 = 0
    members = index.members.tolist()
    dists = index.distances.tolist()
    for m in machine_order:
        for u in owned[m]:
            lo, hi = index.span(u)
            step1[m] += hi - lo
            for pos in range(lo, hi):
                w = members[pos]
                sub = None
                if want_paths:
                    chain = _chain(index, lo, pos)
                    chain.reverse()
                    sub = tuple(chain)
                inbox[plan.machine_of(w)].append(EmitRecord(w, u, dists[pos], sub))
                shuffle_records += 1
                bytes1 += EMIT_RECORD_BYTES + (PATH_NODE_BYTES * len(sub) if sub else 0)

    # step 2: reduce by meeting node
    pair_inbox: list[list[PairRecord]] = [[] for _ in range(p)]
    fan_in: dict[int, int] = {}
    pair_records = 0
    bytes2 = 0
    for m in machine_order:
        records = inbox[m]
        if rng is not None:
            rng.shuffle(records)
        records.sort(key=lambda r: (r.key, r.source))
        start = 0
        while start < len(records):
            w = records[start].key
            stop = start
            while stop < len(records) and records[stop].key == w:
                stop += 1
            group = records[start:stop]
            start = stop
            fan_in[w] = len(group)
            if len(group) > fan_in_cap:
                raise FanInOverflowError(f"key {w} received {len(group)} values (cap {fan_in_cap})")
            by_source = {r.source: r for r in group}
            for a_rec in group:
                a = a_rec.source
                if partners is None:
                    others = [r.source for r in group if r.source > a]
                else:
                    others = sorted(b for b in partners.get(a, ()) if b > a and b in by_source)
                for b in others:
                    b_rec = by_source[b]
                    path = None
                    if want_paths:
                        path = a_rec.subpath + tuple(reversed(b_rec.subpath))[1:]
                    rec = PairRecord((a, b), a_rec.distance + b_rec.distance, w, path)
                    pair_inbox[plan.machine_of_pair(a, b)].append(rec)
                    pair_records += 1
                    bytes2 += PAIR_RECORD_BYTES + (PATH_NODE_BYTES * len(path) if path else 0)

    # step 3: minimum per pair (identity map in front)
    best: dict[tuple[int, int], PairRecord] = {}
    pair_keys = [0] * p
    for m in machine_order:
        records = pair_inbox[m]
        if rng is not None:
            rng.shuffle(records)
        records.sort(key=lambda r: (r.key, r.distance, r.meeting_node))
        seen = 0
        for rec in records:
            if rec.key not in best:
                best[rec.key] = rec
                seen += 1
        pair_keys[m] = seen

    results: list[BatchResult] = []

    def emit(x: int, y: int, a: int, b: int) -> None:
        if a == b:
            results.append(BatchResult(x, y, 0.0, x, "ok", (x,) if want_paths else None))
            return
        key = (a, b) if a < b else (b, a)
        rec = best.get(key)
        if rec is None:
            results.append(BatchResult(x, y, None, None, "no_intersection"))
            return
        path = None
        if want_paths:
            seq = rec.path if a < b else tuple(reversed(rec.path))
            path = tuple(ids[v] for v in seq)
        results.append(BatchResult(x, y, rec.distance, ids[rec.meeting_node], "ok", path))

    if pair_mode:
        for (x, y), (a, b) in zip(requested, dense_pairs):
            if a is None or b is None:
                bad = x if a is None else y
                results.append(BatchResult(x, y, None, None, errors[bad]))
            else:
                emit(x, y, a, b)
    else:
        for x in sorted(errors):
            results.append(BatchResult(x, None, None, None, errors[x]))
        for i, a in enumerate(nodes):
            for b in nodes[i + 1 :]:
                emit(ids[a], ids[b], a, b)

    return BatchRun(
        plan=plan,
        alpha=index.alpha,
        node_count=index.node_count,
        results=results,
        step1_entries=step1,
        resident_entries=resident,
        shuffle_records=shuffle_records,
        shuffle_bytes_round1=bytes1,
        pair_records=pair_records,
        shuffle_bytes_round2=bytes2,
        fan_in=fan_in,
        pair_keys_per_machine=pair_keys,
    )


def account(run: BatchRun) -> Accounting:
    """Memory and bandwidth counters of a finished run."""
    return Accounting(
        machines=run.plan.machines,
        max_step1_entries=max(run.step1_entries),
        storage_bound=storage_bound(run.alpha, run.node_count, run.plan.machines),
        max_resident_entries=max(run.resident_entries),
        shuffle_records=run.shuffle_records,
        pair_records=run.pair_records,
        shuffle_bytes=run.shuffle_bytes_round1 + run.shuffle_bytes_round2,
        max_fan_in=max(run.fan_in.values(), default=0),
        max_pair_keys=max(run.pair_keys_per_machine, default=0),
    )


def read_pairs(stream: IO[str]) -> list[tuple[int, int]]:
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def write_results_csv(
    results: Sequence[BatchResult], stream: IO[str], with_paths: bool = False
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    header = ["u", "v", "distance", "meeting_node", "status"]
    if with_paths:
        header.append("path")
    writer.writerow(header)
    for r in results:
        row = [
            r.u,
            "" if r.v is None else r.v,
            _fmt(r.distance),
            "" if r.meeting_node is None else r.meeting_node,
            r.status,
        ]
        if with_paths:
            row.append(" ".join(map(str, r.path)) if r.path else "")
        writer.writerow(row)
