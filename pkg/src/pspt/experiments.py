"""Intersection-fraction sweeps, accuracy classification and latency benchmarks."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from . import _kernels as K
from .graph import Graph, prune_degree_one
from .index import Index, build_index
from .oracle import bidirectional_search, dense_distances, intersects_along_sp, max_incident_weight
from .query import QueryOutcome, Resolution, _redirect, query

NO_INTERSECTION = "no_intersection"
NOT_ALONG_SP = "intersects_not_along_sp"
ALONG_SP = "intersects_along_sp"


def sample_rounds(
    graph: Graph,
    node_sample: int,
    rounds: int,
    pairs_per_round: int | None,
    seed: int,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per round: ``node_sample`` nodes drawn uniformly (dense ids, any degree)
    and pairs among them as ``(k, 2)`` positions into that sample.

    Without ``pairs_per_round`` every unordered pair of the sample is used.
    """
    rng = np.random.default_rng(seed)
    n = graph.node_count
    k = min(node_sample, n)
    out = []
    for _ in range(rounds):
        nodes = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
        iu, ju = np.triu_indices(k, 1)
        if pairs_per_round is not None and pairs_per_round < iu.size:
            pick = np.sort(rng.choice(iu.size, size=pairs_per_round, replace=False))
            iu, ju = iu[pick], ju[pick]
        # orient each pair at random so the source side is not always the smaller id
        flip = rng.random(iu.size) < 0.5
        a = np.where(flip, ju, iu)
        b = np.where(flip, iu, ju)
        out.append((nodes, np.stack([a, b], axis=1)))
    return out


def _redirect_targets(graph: Graph, nodes: np.ndarray) -> np.ndarray:
    pruned = prune_degree_one(graph)
    red = nodes.copy()
    pend = ~pruned.survives[nodes] & (pruned.anchor[nodes] >= 0)
    red[pend] = pruned.anchor[nodes[pend]]
    return red[pruned.survives[red]]


@dataclass
class PairClass:
    category: str
    resolution: Resolution
    engine_distance: float
    oracle_distance: float
    w_max: float

    @property
    def exact(self) -> bool:
        return self.engine_distance == self.oracle_distance

    @property
    def within_bound(self) -> bool:
        return self.engine_distance <= self.oracle_distance + self.w_max


def classify_pair(
    index: Index,
    graph: Graph,
    s: int,
    t: int,
    dist_s: np.ndarray,
    dist_t: np.ndarray,
    max_w: np.ndarray,
) -> PairClass:
    """Classify dense pair ``(s, t)`` given full oracle distance arrays from both ends."""
    ids = graph.id_list()
    d_st = float(dist_s[t])
    ends = _redirect(index, graph, ids[s], ids[t])
    if isinstance(ends, QueryOutcome):
        if ends.resolution is Resolution.UNREACHABLE:
            return PairClass(NO_INTERSECTION, Resolution.UNREACHABLE, math.inf, d_st, 0.0)
        return PairClass(ALONG_SP, ends.resolution, ends.distance, d_st, 0.0)
    a0, a1 = index.span(ends.s_red)
    b0, b1 = index.span(ends.t_red)
    ia, ib = K.merge_intersect(index.members, a0, a1, b0, b1)
    if ia.size == 0:
        res = Resolution.FALLBACK if math.isfinite(d_st) else Resolution.UNREACHABLE
        return PairClass(NO_INTERSECTION, res, d_st, d_st, 0.0)
    _, _, best = K.best_meeting(index.members, index.distances, a0, a1, b0, b1)
    engine = ends.s_extra + best + ends.t_extra
    w_max = float(max_w[index.members[a0:a1]].max())
    along = intersects_along_sp(
        index.members[ia], index.distances[ia], index.distances[ib],
        dist_s, dist_t, d_st, ends.s_extra, ends.t_extra,
    )
    return PairClass(ALONG_SP if along else NOT_ALONG_SP, Resolution.INTERSECTION, engine, d_st, w_max)


@dataclass
class AlphaRow:
    alpha: float
    beta: int
    tie_mode: str
    pairs: int = 0
    disconnected: int = 0
    intersecting: int = 0
    along_sp: int = 0
    exact: int = 0
    within_bound: int = 0
    fallback: int = 0
    bound_violations: int = 0
    latency: dict[str, float] = field(default_factory=dict)

    def _frac(self, k: int) -> float:
        return k / self.pairs if self.pairs else 0.0

    @property
    def fraction_intersecting(self) -> float:
        return self._frac(self.intersecting)

    @property
    def fraction_intersecting_along_sp(self) -> float:
        return self._frac(self.along_sp)

    @property
    def fraction_exact(self) -> float:
        return self._frac(self.exact)

    @property
    def fraction_within_bound(self) -> float:
        return self._frac(self.within_bound)

    @property
    def fallback_rate(self) -> float:
        return self._frac(self.fallback)

    def as_dict(self) -> dict[str, object]:
        row: dict[str, object] = {
            "alpha": self.alpha,
            "beta": self.beta,
            "tie_mode": self.tie_mode,
            "pairs": self.pairs,
            "disconnected": self.disconnected,
            "intersecting": self.intersecting,
            "along_sp": self.along_sp,
            "exact": self.exact,
            "within_bound": self.within_bound,
            "fallback": self.fallback,
            "bound_violations": self.bound_violations,
            "fraction_intersecting": f"{self.fraction_intersecting:.6f}",
            "fraction_intersecting_along_sp": f"{self.fraction_intersecting_along_sp:.6f}",
            "fraction_exact": f"{self.fraction_exact:.6f}",
            "fraction_within_bound": f"{self.fraction_within_bound:.6f}",
            "fallback_rate": f"{self.fallback_rate:.6f}",
        }
        for key in LATENCY_COLUMNS:
            v = self.latency.get(key)
            row[key] = "" if v is None else f"{v:.3f}"
        return row


LATENCY_COLUMNS = ("engine_p50_us", "engine_p95_us", "engine_p99_us",
                   "baseline_p50_us", "baseline_p95_us", "baseline_p99_us")


@dataclass
class ExperimentReport:
    rows: list[AlphaRow]
    node_sample: int
    rounds: int
    pairs_per_round: int | None
    seed: int
    total_pairs: int

    def write_csv(self, stream: IO[str]) -> None:
        stream.write(
            f"# node_sample={self.node_sample} rounds={self.rounds} "
            f"pairs_per_round={self.pairs_per_round if self.pairs_per_round is not None else 'all'} "
            f"seed={self.seed} total_pairs={self.total_pairs}\n"
        )
        if not self.rows:
            return
        writer = csv.DictWriter(stream, fieldnames=list(self.rows[0].as_dict()), lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow(r.as_dict())


def percentiles_us(samples_ns: Sequence[int]) -> dict[str, float]:
    arr = np.asarray(samples_ns, dtype=np.float64) / 1000.0
    p50, p95, p99 = np.percentile(arr, [50, 95, 99])
    return {"p50": float(p50), "p95": float(p95), "p99": float(p99), "mean": float(arr.mean())}


def run_eval(
    graph: Graph,
    alphas: Sequence[float],
    node_sample: int = 200,
    rounds: int = 5,
    pairs_per_round: int | None = None,
    seed: int = 0,
    tie_modes: Sequence[str] = ("consistent",),
    latency: bool = False,
    threads: int | None = None,
) -> ExperimentReport:
    """Sweep ``alphas`` over a fixed pair sample and classify every pair against the oracle.

    Only blocks of (redirected) sampled nodes are built.  Arbitrary tie
    breaking uses ``seed`` for its per-root tie keys.
    """
    plan = sample_rounds(graph, node_sample, rounds, pairs_per_round, seed)
    pruned = prune_degree_one(graph)
    max_w = max_incident_weight(graph, pruned.survives)
    all_nodes = np.unique(np.concatenate([nodes for nodes, _ in plan]))
    build_roots = _redirect_targets(graph, all_nodes)
    total_pairs = sum(len(p) for _, p in plan)

    rows = {
        (a, mode): AlphaRow(alpha=float(a), beta=0, tie_mode=mode) for a in alphas for mode in tie_modes
    }
    indexes = {}
    for a in alphas:
        for mode in tie_modes:
            ix = build_index(graph, a, roots=build_roots, tie_mode=mode, tie_seed=seed, threads=threads)
            indexes[(a, mode)] = ix
            rows[(a, mode)].beta = ix.beta

    engine_ns: dict[tuple, list[int]] = {key: [] for key in rows}
    baseline_ns: list[int] = []
    ids = graph.id_list()
    for nodes, pairs in plan:
        dist = np.stack([dense_distances(graph, int(u)) for u in nodes])
        for i, j in pairs.tolist():
            s, t = int(nodes[i]), int(nodes[j])
            if latency:
                t0 = time.perf_counter_ns()
                bidirectional_search(graph, ids[s], ids[t])
                baseline_ns.append(time.perf_counter_ns() - t0)
            for key, ix in indexes.items():
                row = rows[key]
                c = classify_pair(ix, graph, s, t, dist[i], dist[j], max_w)
                row.pairs += 1
                if not math.isfinite(c.oracle_distance):
                    row.disconnected += 1
                if c.category != NO_INTERSECTION:
                    row.intersecting += 1
                    row.exact += c.exact
                    if c.within_bound:
                        row.within_bound += 1
                    else:
                        row.bound_violations += 1
                else:
                    row.fallback += 1
                if c.category == ALONG_SP:
                    row.along_sp += 1
                if latency:
                    t0 = time.perf_counter_ns()
                    query(ix, graph, ids[s], ids[t])
                    engine_ns[key].append(time.perf_counter_ns() - t0)

    if latency and baseline_ns:
        base = percentiles_us(baseline_ns)
        for key, row in rows.items():
            eng = percentiles_us(engine_ns[key])
            row.latency = {
                "engine_p50_us": eng["p50"], "engine_p95_us": eng["p95"], "engine_p99_us": eng["p99"],
                "baseline_p50_us": base["p50"], "baseline_p95_us": base["p95"],
                "baseline_p99_us": base["p99"],
            }
    ordered = [rows[(a, mode)] for mode in tie_modes for a in alphas]
    return ExperimentReport(ordered, node_sample, rounds, pairs_per_round, seed, total_pairs)


def sample_pairs(candidates: np.ndarray, count: int, seed: int) -> list[tuple[int, int]]:
    """``count`` ordered pairs of distinct entries of ``candidates``, drawn uniformly."""
    if count < 1:
        raise ValueError("pair count must be positive")
    if candidates.size < 2:
        raise ValueError("need at least two candidate nodes")
    rng = np.random.default_rng(seed)
    out: list[tuple[int, int]] = []
    while len(out) < count:
        need = count - len(out)
        a = rng.integers(0, candidates.size, size=need)
        b = rng.integers(0, candidates.size, size=need)
        keep = a != b
        out.extend(zip(candidates[a[keep]].tolist(), candidates[b[keep]].tolist()))
    return out[:count]


@dataclass
class BenchResult:
    pairs: int
    engine: dict[str, float]
    baseline: dict[str, float]
    resolutions: dict[str, int]
    mismatches: int

    @property
    def median_speedup(self) -> float:
        return self.baseline["p50"] / self.engine["p50"]

    def write_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["method", "pairs", "p50_us", "p95_us", "p99_us", "mean_us"])
        for name, stats in (("engine", self.engine), ("bidirectional", self.baseline)):
            writer.writerow([name, self.pairs] + [f"{stats[k]:.3f}" for k in ("p50", "p95", "p99", "mean")])
        writer.writerow(["median_speedup", self.pairs, f"{self.median_speedup:.2f}", "", "", ""])


def benchmark(
    index: Index,
    graph: Graph,
    pairs: Sequence[tuple[int, int]],
    warmup: int = 50,
) -> BenchResult:
    """Warm, in-memory per-query latency of the engine and of bidirectional search.

    ``pairs`` are original ids and both methods return a path.  An engine
    answer shorter than the exact distance counts as a mismatch, as does any
    difference on a pair the engine did not resolve by intersection.
    """
    for s, t in list(pairs)[:warmup]:
        query(index, graph, s, t)
        bidirectional_search(graph, s, t)
    engine_ns = []
    base_ns = []
    resolutions: dict[str, int] = {}
    answers = []
    for s, t in pairs:
        t0 = time.perf_counter_ns()
        out = query(index, graph, s, t)
        engine_ns.append(time.perf_counter_ns() - t0)
        resolutions[out.resolution.value] = resolutions.get(out.resolution.value, 0) + 1
        answers.append(out)
    mismatches = 0
    for (s, t), out in zip(pairs, answers):
        t0 = time.perf_counter_ns()
        dist, _ = bidirectional_search(graph, s, t)
        base_ns.append(time.perf_counter_ns() - t0)
        if out.distance < dist or (out.resolution is not Resolution.INTERSECTION and out.distance != dist):
            mismatches += 1
    return BenchResult(len(engine_ns), percentiles_us(engine_ns), percentiles_us(base_ns), resolutions, mismatches)
