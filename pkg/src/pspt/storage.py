"""Binary index format.

Little-endian layout::

    magic      8 bytes  b"PSPTIDX1"
    version    u32      = 1
    n_original u64, n_surviving u64, alpha f64, beta u64
    id map     n_original x u64, ascending original ids
    redirects  n_original x (tag u8 [, anchor u64, anchor_weight f64 when tag == 1])
               tag 0 = survivor, 1 = degree-1 redirect, 2 = isolated
    blocks     n_surviving x (root u64, count u32, count x (member u64, distance f64, first_hop u32))
    footer     u32 CRC32 of every byte after the magic

Node ids inside redirects and blocks are dense ids.
"""

from __future__ import annotations

import struct
import zlib
from typing import BinaryIO

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    CorruptIndexError,
    TruncatedIndexError,
    VersionMismatchError,
)
from .index import SENTINEL, Index

MAGIC = b"PSPTIDX1"
VERSION = 1
_HEADER = struct.Struct("<IQQdQ")
_BLOCK_HEAD = struct.Struct("<QI")
_ENTRY = np.dtype([("member", "<u8"), ("distance", "<f8"), ("first_hop", "<u4")])
_REDIRECT = struct.Struct("<Qd")

TAG_SURVIVOR, TAG_REDIRECT, TAG_ISOLATED = 0, 1, 2


def _tags(index: Index) -> np.ndarray:
    tags = np.full(index.node_count, TAG_ISOLATED, dtype=np.uint8)
    tags[index.anchor >= 0] = TAG_REDIRECT
    tags[index.survives] = TAG_SURVIVOR
    return tags


def encoded_size(index: Index) -> int:
    """Exact byte length of :func:`dumps` output, from the format arithmetic."""
    n = index.node_count
    n_redirect = int((index.anchor >= 0).sum())
    return (
        len(MAGIC) + _HEADER.size + 8 * n + n + _REDIRECT.size * n_redirect
        + _BLOCK_HEAD.size * index.block_count + _ENTRY.itemsize * index.entry_count + 4
    )


def dumps(index: Index) -> bytes:
    if not index.complete:
        raise ValueError("only complete indexes can be serialized")
    parts = [
        _HEADER.pack(VERSION, index.node_count, index.block_count, index.alpha, index.beta),
        index.ids.astype("<u8").tobytes(),
    ]
    tags = _tags(index)
    redirect = bytearray()
    for u, tag in enumerate(tags.tolist()):
        redirect.append(tag)
        if tag == TAG_REDIRECT:
            redirect += _REDIRECT.pack(int(index.anchor[u]), float(index.anchor_weight[u]))
    parts.append(bytes(redirect))

    entries = np.empty(index.entry_count, dtype=_ENTRY)
    entries["member"] = index.members
    entries["distance"] = index.distances
    entries["first_hop"] = index.first_hop
    raw = entries.tobytes()
    step = _ENTRY.itemsize
    offsets = index.offsets.tolist()
    for b, root in enumerate(index.roots.tolist()):
        lo, hi = offsets[b], offsets[b + 1]
        parts.append(_BLOCK_HEAD.pack(root, hi - lo))
        parts.append(raw[lo * step : hi * step])

    body = b"".join(parts)
    return MAGIC + body + struct.pack("<I", zlib.crc32(body))


def serialize(index: Index, sink: BinaryIO) -> int:
    data = dumps(index)
    sink.write(data)
    return len(data)


def _need(data: bytes, pos: int, size: int) -> None:
    if pos + size > len(data):
        raise TruncatedIndexError(f"stream ends at byte {len(data)}, need {pos + size}")


def loads(data: bytes) -> Index:
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise BadMagicError("not a PSPT index (bad magic)")
    pos = len(MAGIC)
    _need(data, pos, _HEADER.size)
    version, n, n_surv, alpha, beta = _HEADER.unpack_from(data, pos)
    if version != VERSION:
        raise VersionMismatchError(f"format version {version}, expected {VERSION}")
    pos += _HEADER.size

    # walk the variable-length layout before trusting the checksum position
    _need(data, pos, 8 * n)
    ids_pos = pos
    pos += 8 * n
    red_pos = pos
    for _ in range(n):
        _need(data, pos, 1)
        tag = data[pos]
        pos += 1
        if tag == TAG_REDIRECT:
            pos += _REDIRECT.size
    blocks_pos = pos
    heads = []
    for _ in range(n_surv):
        _need(data, pos, _BLOCK_HEAD.size)
        root, count = _BLOCK_HEAD.unpack_from(data, pos)
        pos += _BLOCK_HEAD.size
        heads.append((root, count, pos))
        pos += count * _ENTRY.itemsize
    _need(data, pos, 4)
    if pos + 4 != len(data):
        raise CorruptIndexError(f"{len(data) - pos - 4} trailing bytes after footer")
    (crc,) = struct.unpack_from("<I", data, pos)
    if zlib.crc32(data[len(MAGIC) : pos]) != crc:
        raise ChecksumError("CRC32 mismatch")

    ids = np.frombuffer(data, dtype="<u8", count=n, offset=ids_pos).astype(np.int64)
    survives = np.zeros(n, dtype=bool)
    anchor = np.full(n, -1, dtype=np.int64)
    anchor_weight = np.full(n, np.nan)
    p = red_pos
    for u in range(n):
        tag = data[p]
        p += 1
        if tag == TAG_SURVIVOR:
            survives[u] = True
        elif tag == TAG_REDIRECT:
            a, w = _REDIRECT.unpack_from(data, p)
            p += _REDIRECT.size
            anchor[u] = a
            anchor_weight[u] = w
        elif tag != TAG_ISOLATED:
            raise CorruptIndexError(f"unknown redirect tag {tag} for node {u}")
    assert p == blocks_pos

    roots = np.array([h[0] for h in heads], dtype=np.int64)
    counts = np.array([h[1] for h in heads], dtype=np.int64)
    offsets = np.zeros(n_surv + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    if roots.size and (roots.min() < 0 or roots.max() >= n):
        raise CorruptIndexError("block root out of range")
    if heads:
        entries = np.concatenate(
            [np.frombuffer(data, dtype=_ENTRY, count=c, offset=o) for _, c, o in heads]
        )
    else:
        entries = np.zeros(0, dtype=_ENTRY)
    index = Index(
        alpha=float(alpha),
        beta=int(beta),
        ids=ids,
        survives=survives,
        anchor=anchor,
        anchor_weight=anchor_weight,
        roots=roots,
        offsets=offsets,
        members=entries["member"].astype(np.int64),
        distances=entries["distance"].astype(np.float64),
        first_hop=entries["first_hop"].astype(np.uint32),
    )
    validate(index)
    return index


def deserialize(source: BinaryIO) -> Index:
    return loads(source.read())


def validate(index: Index) -> None:
    """Check the structural invariants of a decoded index."""
    n = index.node_count
    if index.beta < 1 or not (index.alpha > 0):
        raise CorruptIndexError("alpha and beta must be positive")
    if n > 1 and np.any(np.diff(index.ids) <= 0):
        raise CorruptIndexError("id map is not strictly ascending")
    if np.any(index.ids < 0):
        raise CorruptIndexError("negative original id")
    red = index.anchor >= 0
    if np.any(index.anchor[red] >= n) or not np.all(index.anchor_weight[red] > 0):
        raise CorruptIndexError("bad redirect entry")
    if not np.array_equal(index.roots, np.flatnonzero(index.survives)):
        raise CorruptIndexError("blocks do not match the surviving nodes")
    counts = np.diff(index.offsets)
    if np.any(counts < 1) or np.any(counts > index.beta):
        raise CorruptIndexError("block size outside [1, beta]")
    m = index.members
    if m.size and (m.min() < 0 or m.max() >= n or not np.all(index.survives[m])):
        raise CorruptIndexError("block member is not a surviving node")
    starts = index.offsets[:-1]
    within = np.ones(m.size, dtype=bool)
    within[starts] = False
    if np.any(np.diff(m)[within[1:]] <= 0):
        raise CorruptIndexError("block members not strictly ascending")
    block_id = np.repeat(np.arange(index.block_count), counts)
    hop = index.first_hop.astype(np.int64)
    root_rows = m == index.roots[block_id]
    if not np.array_equal(np.bincount(block_id[root_rows], minlength=index.block_count),
                          np.ones(index.block_count, dtype=np.int64)):
        raise CorruptIndexError("block does not contain its root exactly once")
    if np.any(hop[root_rows] != SENTINEL) or np.any(index.distances[root_rows] != 0):
        raise CorruptIndexError("root entry must have distance 0 and no first hop")
    other = ~root_rows
    if np.any(hop[other] >= counts[block_id[other]]):
        raise CorruptIndexError("first hop outside its block")
    parent_dist = index.distances[index.offsets[block_id[other]] + hop[other]]
    if np.any(parent_dist >= index.distances[other]):
        raise CorruptIndexError("first hop is not strictly closer to the root")
