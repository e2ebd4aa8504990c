"""Undirected weighted graphs in CSR form, edge-list I/O and degree-1 pruning."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import GraphValidationError, ParseError, UnknownNodeError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with dense ids ``0..n-1``.

    ``ids[d]`` is the original id of dense node ``d``; ids are strictly
    ascending so comparing dense ids is the same as comparing original ids.
    Each adjacency row is sorted by ``(weight, neighbor)``.
    """

    ids: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    self_loops_dropped: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(
        cls,
        src: Iterable[int],
        dst: Iterable[int],
        weights: Iterable[float] | None = None,
        nodes: Iterable[int] | None = None,
    ) -> "Graph":
        """Build a normalized graph from parallel endpoint/weight sequences.

        Self-loops are dropped (their endpoint still becomes a node),
        duplicate undirected edges collapse to their minimum weight and a
        missing weight means 1.  ``nodes`` adds extra, possibly isolated, ids.
        """
        src = np.asarray(list(src) if not isinstance(src, np.ndarray) else src, dtype=np.int64)
        dst = np.asarray(list(dst) if not isinstance(dst, np.ndarray) else dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise GraphValidationError("endpoint arrays differ in length")
        if weights is None:
            w = np.ones(src.shape[0], dtype=np.float64)
        else:
            w = np.asarray(
                list(weights) if not isinstance(weights, np.ndarray) else weights,
                dtype=np.float64,
            )
            if w.shape != src.shape:
                raise GraphValidationError("weight array differs in length")
        if src.size and (src.min() < 0 or dst.min() < 0):
            raise GraphValidationError("node ids must be non-negative")
        if w.size and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            bad = w[~(np.isfinite(w) & (w > 0))][0]
            raise GraphValidationError(f"edge weights must be finite and > 0, got {bad!r}")

        extra = np.asarray(list(nodes) if nodes is not None else [], dtype=np.int64)
        ids = np.unique(np.concatenate([src, dst, extra]))
        n = ids.size

        loops = src == dst
        dropped = int(loops.sum())
        if dropped:
            log.warning("dropped %d self-loop(s)", dropped)
        keep = ~loops
        a = np.searchsorted(ids, src[keep])
        b = np.searchsorted(ids, dst[keep])
        w = w[keep]

        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        if lo.size:
            order = np.lexsort((w, hi, lo))
            lo, hi, w = lo[order], hi[order], w[order]
            first = np.ones(lo.size, dtype=bool)
            first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
            # sorted by weight inside each pair, so the first record is the minimum
            lo, hi, w = lo[first], hi[first], w[first]

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        ww = np.concatenate([w, w])
        order = np.lexsort((cols, ww, rows))
        rows, cols, ww = rows[order], cols[order], ww[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(
            ids=ids,
            indptr=indptr,
            indices=cols.astype(np.int64),
            weights=ww.astype(np.float64),
            self_loops_dropped=dropped,
        )

    @property
    def node_count(self) -> int:
        return int(self.ids.size)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def _id_lookup(self) -> dict[int, int]:
        lookup = self._cache.get("lookup")
        if lookup is None:
            lookup = {orig: d for d, orig in enumerate(self.ids.tolist())}
            self._cache["lookup"] = lookup
        return lookup

    def id_list(self) -> list[int]:
        """Original ids as a plain list (cached), for fast scalar indexing."""
        ids = self._cache.get("ids")
        if ids is None:
            ids = self.ids.tolist()
            self._cache["ids"] = ids
        return ids

    def dense(self, original: int) -> int:
        try:
            return self._id_lookup()[original]
        except (KeyError, TypeError):
            raise UnknownNodeError(original) from None

    def original(self, dense: int) -> int:
        return self.id_list()[dense]

    def __contains__(self, original: object) -> bool:
        return original in self._id_lookup()

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense neighbor ids and weights of dense node ``u``."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def edge_weight(self, u: int, v: int) -> float | None:
        """Weight of dense edge ``u``-``v`` or ``None`` if absent."""
        nbrs, ws = self.neighbors(u)
        hit = np.flatnonzero(nbrs == v)
        return float(ws[hit[0]]) if hit.size else None

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once as dense ``(u, v, w)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degree)
        mask = rows < self.indices
        u, v, w = rows[mask], self.indices[mask], self.weights[mask]
        order = np.lexsort((v, u))
        return u[order], v[order], w[order]

    def path_length(self, path: Iterable[int]) -> float:
        """Sum of edge weights along a sequence of original ids.

        Raises ``GraphValidationError`` if two consecutive nodes are not adjacent.
        """
        nodes = [self.dense(x) for x in path]
        total = 0.0
        for a, b in zip(nodes, nodes[1:]):
            w = self.edge_weight(a, b)
            if w is None:
                raise GraphValidationError(
                    f"{self.original(a)} and {self.original(b)} are not adjacent"
                )
            total += w
        return total


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def write_edge_list(graph: Graph, stream: IO[str], weighted: bool | None = None) -> None:
    """Write ``u v [w]`` lines, one per undirected edge, ascending by ``(u, v)``.

    Weights are written unless every edge has weight 1 (or ``weighted`` forces it).
    Isolated nodes cannot be represented and are silently lost.
    """
    u, v, w = graph.edge_arrays()
    if weighted is None:
        weighted = bool(np.any(w != 1.0))
    ids = graph.ids
    if weighted:
        for a, b, x in zip(ids[u].tolist(), ids[v].tolist(), w.tolist()):
            stream.write(f"{a} {b} {_format_weight(x)}\n")
    else:
        for a, b in zip(ids[u].tolist(), ids[v].tolist()):
            stream.write(f"{a} {b}\n")


def load_edge_list(stream: IO[str] | Iterable[str]) -> Graph:
    """Parse a SNAP-style edge list (``u v`` or ``u v w`` per line, ``#`` comments)."""
    src: list[int] = []
    dst: list[int] = []
    wts: list[float] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(lineno, f"expected 'u v' or 'u v w', got {line!r}")
        try:
            a = int(parts[0])
            b = int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"node ids must be integers: {line!r}") from None
        if a < 0 or b < 0:
            raise ParseError(lineno, f"node ids must be non-negative: {line!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(lineno, f"bad weight {parts[2]!r}") from None
            if not (math.isfinite(w) and w > 0):
                raise GraphValidationError(f"line {lineno}: weight must be > 0, got {parts[2]}")
        else:
            w = 1.0
        src.append(a)
        dst.append(b)
        wts.append(w)
    return Graph.from_edges(
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        np.asarray(wts, dtype=np.float64),
    )


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


@dataclass(frozen=True, eq=False)
class PrunedView:
    """Survivor flags and the degree-1 redirect table.

    ``anchor[u]`` is the only neighbor of a degree-1 node ``u`` (``-1``
    otherwise) and ``anchor_weight[u]`` the weight of that edge.
    """

    survives: np.ndarray
    anchor: np.ndarray
    anchor_weight: np.ndarray

    @property
    def surviving_count(self) -> int:
        return int(self.survives.sum())

    def redirect(self, u: int) -> tuple[int, float] | None:
        a = int(self.anchor[u])
        if a < 0:
            return None
        return a, float(self.anchor_weight[u])


def prune_degree_one(graph: Graph) -> PrunedView:
    """Single-pass removal of nodes with degree <= 1 in the original graph."""
    deg = graph.degree
    survives = deg >= 2
    anchor = np.full(graph.node_count, -1, dtype=np.int64)
    anchor_weight = np.full(graph.node_count, np.nan, dtype=np.float64)
    leaves = np.flatnonzero(deg == 1)
    first = graph.indptr[leaves]
    anchor[leaves] = graph.indices[first]
    anchor_weight[leaves] = graph.weights[first]
    return PrunedView(survives=survives, anchor=anchor, anchor_weight=anchor_weight)
