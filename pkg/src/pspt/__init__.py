"""Shortest-path queries answered by intersecting per-node partial shortest path trees."""

from .distributed import ClusterPlan, account, batch_query
from .errors import (
    BadMagicError,
    ChecksumError,
    ContractError,
    CorruptIndexError,
    GraphValidationError,
    IndexFormatError,
    ParseError,
    TruncatedIndexError,
    UnknownNodeError,
    VersionMismatchError,
)
from .graph import Graph, PrunedView, load_edge_list, prune_degree_one, write_edge_list
from .index import Index, Pspt, PsptEntry, build_index, build_pspt, intersect, pspt_size
from .oracle import UNREACHABLE, Path, all_pairs_paths, bidirectional_search, dijkstra
from .query import QueryOutcome, Resolution, query, query_multi, reconstruct_subpath
from .storage import deserialize, dumps, loads, serialize

__all__ = [
    "BadMagicError", "ChecksumError", "ClusterPlan", "ContractError", "CorruptIndexError",
    "Graph", "GraphValidationError", "Index", "IndexFormatError", "ParseError", "Path",
    "PrunedView", "Pspt", "PsptEntry", "QueryOutcome", "Resolution", "TruncatedIndexError",
    "UNREACHABLE", "UnknownNodeError", "VersionMismatchError", "account", "all_pairs_paths",
    "batch_query", "bidirectional_search", "build_index", "build_pspt", "deserialize",
    "dijkstra", "dumps", "intersect", "load_edge_list", "loads", "prune_degree_one",
    "pspt_size", "query", "query_multi", "reconstruct_subpath", "serialize", "write_edge_list",
]
