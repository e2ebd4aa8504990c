"""Deterministic synthetic graphs: preferential attachment, G(n, p), lines and grids."""

from __future__ import annotations

import random

import numpy as np

from .graph import Graph


def _weights(rng: random.Random, count: int, max_weight: int) -> np.ndarray:
    if max_weight <= 1:
        return np.ones(count, dtype=np.float64)
    return np.array([rng.randint(1, max_weight) for _ in range(count)], dtype=np.float64)


def preferential_attachment(n: int, m: int, seed: int = 0, max_weight: int = 1) -> Graph:
    """Barabasi-Albert style growth with ``m`` edges per arriving node.

    Nodes ``0..m-1`` start isolated, node ``m`` links to all of them and each
    later node links to ``m`` distinct earlier nodes chosen proportionally to
    degree, so the graph has exactly ``m * (n - m)`` edges.  Node ids follow
    arrival order.
    """
    if m < 1 or n <= m:
        raise ValueError("need n > m >= 1")
    rng = random.Random(seed)
    src: list[int] = []
    dst: list[int] = []
    targets = list(range(m))
    repeated: list[int] = []
    for node in range(m, n):
        src.extend([node] * m)
        dst.extend(targets)
        repeated.extend(targets)
        repeated.extend([node] * m)
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(rng.choice(repeated))
        targets = sorted(chosen)
    w = _weights(rng, len(src), max_weight)
    return Graph.from_edges(np.array(src), np.array(dst), w)


def erdos_renyi(n: int, p: float, seed: int = 0, max_weight: int = 1) -> Graph:
    """G(n, p); every node ``0..n-1`` is kept even when isolated."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    src = []
    dst = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - i - 1) < p) + i + 1
        src.append(np.full(hits.size, i, dtype=np.int64))
        dst.append(hits)
    s = np.concatenate(src) if src else np.zeros(0, dtype=np.int64)
    d = np.concatenate(dst) if dst else np.zeros(0, dtype=np.int64)
    w = _weights(random.Random(seed), s.size, max_weight)
    return Graph.from_edges(s, d, w, nodes=range(n))


def line(n: int, seed: int = 0, max_weight: int = 1) -> Graph:
    s = np.arange(n - 1, dtype=np.int64)
    return Graph.from_edges(s, s + 1, _weights(random.Random(seed), s.size, max_weight), nodes=range(n))


def grid(rows: int, cols: int, seed: int = 0, max_weight: int = 1) -> Graph:
    """``rows x cols`` lattice; node ``r * cols + c``."""
    ids = np.arange(rows * cols, dtype=np.int64).reshape(rows, cols)
    s = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    d = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    w = _weights(random.Random(seed), s.size, max_weight)
    return Graph.from_edges(s, d, w, nodes=range(rows * cols))


MODELS = ("pa", "er", "line", "grid")


def generate(model: str, seed: int = 0, max_weight: int = 1, **params) -> Graph:
    if model == "pa":
        return preferential_attachment(params["n"], params["m"], seed, max_weight)
    if model == "er":
        return erdos_renyi(params["n"], params["p"], seed, max_weight)
    if model == "line":
        return line(params["n"], seed, max_weight)
    if model == "grid":
        return grid(params["rows"], params["cols"], seed, max_weight)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
