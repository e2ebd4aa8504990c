"""Compiled inner loops: truncated Dijkstra, block merges, full and bidirectional search.

All kernels work on dense ids and CSR arrays.  Scratch arrays are owned by
the caller (see :class:`Workspace`) and are left in their reset state on
return, so a workspace can be reused without an O(n) clear.
"""

from __future__ import annotations

import numpy as np
from numba import njit

SENTINEL = np.uint32(0xFFFFFFFF)
INF = np.inf


# -- binary min-heap over (dist, tie, node) -----------------------------------


@njit(inline="always")
def _less(d1, k1, v1, d2, k2, v2):
    if d1 != d2:
        return d1 < d2
    if k1 != k2:
        return k1 < k2
    return v1 < v2


@njit(inline="always")
def _push(hd, hk, hv, size, d, k, v):
    i = size
    while i > 0:
        p = (i - 1) >> 1
        if _less(d, k, v, hd[p], hk[p], hv[p]):
            hd[i] = hd[p]
            hk[i] = hk[p]
            hv[i] = hv[p]
            i = p
        else:
            break
    hd[i] = d
    hk[i] = k
    hv[i] = v
    return size + 1


@njit(inline="always")
def _pop(hd, hk, hv, size):
    """Remove the root; caller reads hd[0], hk[0], hv[0] beforehand."""
    size -= 1
    d = hd[size]
    k = hk[size]
    v = hv[size]
    i = 0
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _less(hd[c + 1], hk[c + 1], hv[c + 1], hd[c], hk[c], hv[c]):
            c += 1
        if _less(hd[c], hk[c], hv[c], d, k, v):
            hd[i] = hd[c]
            hk[i] = hk[c]
            hv[i] = hv[c]
            i = c
        else:
            break
    if size > 0:
        hd[i] = d
        hk[i] = k
        hv[i] = v
    return size


# -- max-heap of plain floats (truncation bound) ------------------------------


@njit(inline="always")
def _bpush(b, size, x):
    i = size
    while i > 0:
        p = (i - 1) >> 1
        if b[p] < x:
            b[i] = b[p]
            i = p
        else:
            break
    b[i] = x
    return size + 1


@njit(inline="always")
def _breplace_top(b, size, x):
    i = 0
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and b[c + 1] > b[c]:
            c += 1
        if b[c] > x:
            b[i] = b[c]
            i = c
        else:
            break
    b[i] = x


# -- tie keys -----------------------------------------------------------------


@njit(inline="always")
def _mix64(x):
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@njit(inline="always")
def _tie_key(v, salt, arbitrary):
    if not arbitrary:
        return np.int64(v)
    return np.int64(_mix64(salt ^ np.uint64(v)) >> np.uint64(1))


# -- truncated Dijkstra (one block) ---------------------------------------------


@njit(nogil=True, cache=True)
def truncated_dijkstra(
    indptr, indices, weights, survives, root, beta, arbitrary, tie_seed,
    dist, parent, state, touched, hd, hk, hv, bound_heap,
    out_node, out_dist, out_parent,
):
    """Settle the first ``beta`` surviving nodes from ``root`` in (dist, tie, id) order.

    Writes settlement order into ``out_*`` and returns the number settled.
    A neighbor relaxation whose distance exceeds the ``beta``-th smallest
    known tentative distance cannot enter the prefix and is skipped.
    """
    salt = _mix64(np.uint64(tie_seed) ^ _mix64(np.uint64(root) + np.uint64(0x9E3779B97F4A7C15)))
    ntouched = 0
    size = 0
    nbound = 0
    bound = INF

    dist[root] = 0.0
    parent[root] = -1
    state[root] = 1
    touched[ntouched] = root
    ntouched += 1
    size = _push(hd, hk, hv, size, 0.0, _tie_key(root, salt, arbitrary), root)
    nbound = _bpush(bound_heap, nbound, 0.0)
    if nbound == beta:
        bound = bound_heap[0]

    count = 0
    while size > 0 and count < beta:
        d = hd[0]
        u = hv[0]
        size = _pop(hd, hk, hv, size)
        if state[u] == 2 or d != dist[u]:
            continue
        state[u] = 2
        out_node[count] = u
        out_dist[count] = d
        out_parent[count] = parent[u]
        count += 1
        if count == beta:
            break
        for e in range(indptr[u], indptr[u + 1]):
            nd = d + weights[e]
            if nd > bound:
                break  # rows are sorted by weight
            v = indices[e]
            if not survives[v]:
                continue
            sv = state[v]
            if sv == 2:
                continue
            if sv == 0:
                state[v] = 1
                touched[ntouched] = v
                ntouched += 1
                dist[v] = nd
                parent[v] = u
                size = _push(hd, hk, hv, size, nd, _tie_key(v, salt, arbitrary), v)
                if nbound < beta:
                    nbound = _bpush(bound_heap, nbound, nd)
                    if nbound == beta:
                        bound = bound_heap[0]
                elif nd < bound_heap[0]:
                    _breplace_top(bound_heap, nbound, nd)
                    bound = bound_heap[0]
            elif nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                size = _push(hd, hk, hv, size, nd, _tie_key(v, salt, arbitrary), v)

    for i in range(ntouched):
        x = touched[i]
        dist[x] = INF
        state[x] = 0
        parent[x] = -1
    return count


@njit(nogil=True, cache=True)
def build_blocks(
    indptr, indices, weights, survives, roots, beta, arbitrary, tie_seed,
    dist, parent, state, touched, pos, hd, hk, hv, bound_heap,
):
    """Build the blocks of ``roots`` and lay them out back to back.

    Returns ``(counts, members, distances, first_hop)``; each block is sorted
    by member id and ``first_hop`` indexes within its own block.
    """
    nroots = roots.shape[0]
    counts = np.zeros(nroots, dtype=np.int64)
    cap = nroots * beta
    members = np.empty(cap, dtype=np.int64)
    dists = np.empty(cap, dtype=np.float64)
    hops = np.empty(cap, dtype=np.uint32)
    o_node = np.empty(beta, dtype=np.int64)
    o_dist = np.empty(beta, dtype=np.float64)
    o_par = np.empty(beta, dtype=np.int64)
    off = 0
    for r in range(nroots):
        k = truncated_dijkstra(
            indptr, indices, weights, survives, roots[r], beta, arbitrary, tie_seed,
            dist, parent, state, touched, hd, hk, hv, bound_heap,
            o_node, o_dist, o_par,
        )
        order = np.argsort(o_node[:k], kind="mergesort")
        for i in range(k):
            pos[o_node[order[i]]] = i
        for i in range(k):
            j = order[i]
            members[off + i] = o_node[j]
            dists[off + i] = o_dist[j]
            p = o_par[j]
            hops[off + i] = SENTINEL if p < 0 else np.uint32(pos[p])
        for i in range(k):
            pos[o_node[i]] = -1
        counts[r] = k
        off += k
    return counts, members[:off].copy(), dists[:off].copy(), hops[:off].copy()


# -- block intersection ---------------------------------------------------------


@njit(nogil=True, cache=True)
def merge_intersect(members, a0, a1, b0, b1):
    """Two-pointer merge of two member-sorted slices of ``members``.

    Returns the positions (absolute into ``members``) of common members.
    """
    n = min(a1 - a0, b1 - b0)
    ia = np.empty(n, dtype=np.int64)
    ib = np.empty(n, dtype=np.int64)
    i = a0
    j = b0
    k = 0
    while i < a1 and j < b1:
        x = members[i]
        y = members[j]
        if x < y:
            i += 1
        elif x > y:
            j += 1
        else:
            ia[k] = i
            ib[k] = j
            k += 1
            i += 1
            j += 1
    return ia[:k], ib[:k]


@njit(inline="always")
def _diagonal(members, a0, na, b0, nb, diag):
    """Split point of the merge of two blocks after ``diag`` elements.

    Equal members go to the ``a`` side first; a common member is never cut
    apart from its partner.
    """
    lo = max(0, diag - nb)
    hi = min(diag, na)
    while lo < hi:
        mid = (lo + hi) >> 1
        if members[a0 + mid] <= members[b0 + diag - mid - 1]:
            lo = mid + 1
        else:
            hi = mid
    i = lo
    j = diag - lo
    if i > 0 and j < nb and members[a0 + i - 1] == members[b0 + j]:
        j += 1
    return a0 + i, b0 + j


@njit(inline="always")
def _merge_step(members, dists, i, j, s, k, l):
    x = members[i]
    y = members[j]
    t = dists[i] + dists[j]
    hit = (x == y) & (t < s)
    s = t if hit else s
    k = i if hit else k
    l = j if hit else l
    return i + np.uint64(x <= y), j + np.uint64(y <= x), s, k, l


@njit(nogil=True, cache=True)
def best_meeting(members, dists, a0, a1, b0, b1):
    """Common member minimizing the distance sum; ties go to the smaller id.

    Returns ``(i, j, total)`` as absolute positions, or ``(-1, -1, inf)``.
    The merge is cut along its diagonal into four runs of equal work that
    are stepped in lockstep, so their loads overlap.
    """
    na = a1 - a0
    nb = b1 - b0
    tot = na + nb
    x1, y1 = _diagonal(members, a0, na, b0, nb, tot // 4)
    x2, y2 = _diagonal(members, a0, na, b0, nb, tot // 2)
    x3, y3 = _diagonal(members, a0, na, b0, nb, (3 * tot) // 4)
    e0 = np.uint64(x1)
    f0 = np.uint64(y1)
    e1 = np.uint64(x2)
    f1 = np.uint64(y2)
    e2 = np.uint64(x3)
    f2 = np.uint64(y3)
    e3 = np.uint64(a1)
    f3 = np.uint64(b1)
    i0 = np.uint64(a0)
    j0 = np.uint64(b0)
    i1, j1, i2, j2, i3, j3 = e0, f0, e1, f1, e2, f2
    s0 = s1 = s2 = s3 = INF
    k0 = k1 = k2 = k3 = np.uint64(0)
    l0 = l1 = l2 = l3 = np.uint64(0)
    while ((i0 < e0) & (j0 < f0) & (i1 < e1) & (j1 < f1)
           & (i2 < e2) & (j2 < f2) & (i3 < e3) & (j3 < f3)):
        i0, j0, s0, k0, l0 = _merge_step(members, dists, i0, j0, s0, k0, l0)
        i1, j1, s1, k1, l1 = _merge_step(members, dists, i1, j1, s1, k1, l1)
        i2, j2, s2, k2, l2 = _merge_step(members, dists, i2, j2, s2, k2, l2)
        i3, j3, s3, k3, l3 = _merge_step(members, dists, i3, j3, s3, k3, l3)
    while i0 < e0 and j0 < f0:
        i0, j0, s0, k0, l0 = _merge_step(members, dists, i0, j0, s0, k0, l0)
    while i1 < e1 and j1 < f1:
        i1, j1, s1, k1, l1 = _merge_step(members, dists, i1, j1, s1, k1, l1)
    while i2 < e2 and j2 < f2:
        i2, j2, s2, k2, l2 = _merge_step(members, dists, i2, j2, s2, k2, l2)
    while i3 < e3 and j3 < f3:
        i3, j3, s3, k3, l3 = _merge_step(members, dists, i3, j3, s3, k3, l3)
    # runs cover ascending member ranges, so strict < keeps the smaller id
    best, bi, bj = s0, k0, l0
    if s1 < best:
        best, bi, bj = s1, k1, l1
    if s2 < best:
        best, bi, bj = s2, k2, l2
    if s3 < best:
        best, bi, bj = s3, k3, l3
    if best == INF:
        return -1, -1, INF
    return np.int64(bi), np.int64(bj), best


@njit(nogil=True, cache=True)
def meeting_path(members, dists, hops, a0, a1, b0, b1, out):
    """:func:`best_meeting` plus the dense core path written into ``out``.

    Returns ``(total, meeting position, path length)``; length 0 when the
    blocks are disjoint.
    """
    i, j, best = best_meeting(members, dists, a0, a1, b0, b1)
    if i < 0:
        return best, -1, 0
    n = 0
    pos = i
    while True:
        out[n] = members[pos]
        n += 1
        h = hops[pos]
        if h == SENTINEL:
            break
        pos = a0 + h
    # reverse the s side so it runs root first
    lo = 0
    hi = n - 1
    while lo < hi:
        tmp = out[lo]
        out[lo] = out[hi]
        out[hi] = tmp
        lo += 1
        hi -= 1
    pos = j
    h = hops[pos]
    while h != SENTINEL:
        pos = b0 + h
        out[n] = members[pos]
        n += 1
        h = hops[pos]
    return best, i, n


@njit(nogil=True, cache=True)
def count_common(ma, mb):
    i = 0
    j = 0
    k = 0
    while i < ma.shape[0] and j < mb.shape[0]:
        if ma[i] < mb[j]:
            i += 1
        elif ma[i] > mb[j]:
            j += 1
        else:
            k += 1
            i += 1
            j += 1
    return k


# -- exact searches -------------------------------------------------------------


@njit(nogil=True, cache=True)
def full_dijkstra(indptr, indices, weights, survives, restrict, source, hd, hk, hv):
    """Single-source distances and parents over the whole component of ``source``.

    Settlement order is (dist, id); a parent is replaced only on strict
    improvement.  With ``restrict`` only surviving nodes are entered.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, INF)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    dist[source] = 0.0
    size = _push(hd, hk, hv, 0, 0.0, np.int64(source), source)
    while size > 0:
        d = hd[0]
        u = hv[0]
        size = _pop(hd, hk, hv, size)
        if done[u] or d != dist[u]:
            continue
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if restrict and not survives[v]:
                continue
            if done[v]:
                continue
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                size = _push(hd, hk, hv, size, nd, np.int64(v), v)
    return dist, parent


@njit(nogil=True, cache=True)
def bidirectional(
    indptr, indices, weights, s, t,
    dist_f, dist_b, par_f, par_b, done_f, done_b, touched,
    hd_f, hk_f, hv_f, hd_b, hk_b, hv_b, out_path,
):
    """Bidirectional Dijkstra between dense ``s != t``.

    Stops once the two frontier minima sum to at least the best meeting
    candidate.  Returns ``(distance, path_len)`` with the node sequence in
    ``out_path[:path_len]``; distance is inf and path_len 0 when unreachable.
    """
    ntouched = 0
    dist_f[s] = 0.0
    dist_b[t] = 0.0
    touched[ntouched] = s
    ntouched += 1
    touched[ntouched] = t
    ntouched += 1
    sf = _push(hd_f, hk_f, hv_f, 0, 0.0, np.int64(s), s)
    sb = _push(hd_b, hk_b, hv_b, 0, 0.0, np.int64(t), t)
    mu = INF
    mu_u = -1
    mu_v = -1

    while sf > 0 and sb > 0:
        if hd_f[0] + hd_b[0] >= mu:
            break
        forward = hd_f[0] <= hd_b[0]
        if forward:
            d = hd_f[0]
            u = hv_f[0]
            sf = _pop(hd_f, hk_f, hv_f, sf)
            if done_f[u] or d != dist_f[u]:
                continue
            done_f[u] = True
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                nd = d + weights[e]
                if not done_f[v] and nd < dist_f[v]:
                    if dist_f[v] == INF and dist_b[v] == INF:
                        touched[ntouched] = v
                        ntouched += 1
                    dist_f[v] = nd
                    par_f[v] = u
                    sf = _push(hd_f, hk_f, hv_f, sf, nd, np.int64(v), v)
                if dist_b[v] < INF:
                    c = d + weights[e] + dist_b[v]
                    if c < mu:
                        mu = c
                        mu_u = u
                        mu_v = v
        else:
            d = hd_b[0]
            u = hv_b[0]
            sb = _pop(hd_b, hk_b, hv_b, sb)
            if done_b[u] or d != dist_b[u]:
                continue
            done_b[u] = True
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                nd = d + weights[e]
                if not done_b[v] and nd < dist_b[v]:
                    if dist_f[v] == INF and dist_b[v] == INF:
                        touched[ntouched] = v
                        ntouched += 1
                    dist_b[v] = nd
                    par_b[v] = u
                    sb = _push(hd_b, hk_b, hv_b, sb, nd, np.int64(v), v)
                if dist_f[v] < INF:
                    c = dist_f[v] + weights[e] + d
                    if c < mu:
                        mu = c
                        mu_u = v
                        mu_v = u

    plen = 0
    if mu < INF:
        # forward half: mu_u back to s, then reverse in place
        x = mu_u
        while x != -1:
            out_path[plen] = x
            plen += 1
            x = par_f[x]
        i = 0
        j = plen - 1
        while i < j:
            tmp = out_path[i]
            out_path[i] = out_path[j]
            out_path[j] = tmp
            i += 1
            j -= 1
        x = mu_v
        while x != -1:
            out_path[plen] = x
            plen += 1
            x = par_b[x]

    for i in range(ntouched):
        x = touched[i]
        dist_f[x] = INF
        dist_b[x] = INF
        par_f[x] = -1
        par_b[x] = -1
        done_f[x] = False
        done_b[x] = False
    return mu, plen


class Workspace:
    """Reusable scratch arrays sized for one graph; not thread-safe."""

    def __init__(self, n: int, m2: int, beta: int = 1):
        cap = m2 + 2
        self.dist = np.full(n, np.inf)
        self.dist_b = np.full(n, np.inf)
        self.parent = np.full(n, -1, dtype=np.int64)
        self.parent_b = np.full(n, -1, dtype=np.int64)
        self.state = np.zeros(n, dtype=np.int8)
        self.done_f = np.zeros(n, dtype=np.bool_)
        self.done_b = np.zeros(n, dtype=np.bool_)
        self.touched = np.empty(n + 2, dtype=np.int64)
        self.pos = np.full(n, -1, dtype=np.int64)
        self.path = np.empty(n + 1, dtype=np.int64)
        self.hd = np.empty(cap, dtype=np.float64)
        self.hk = np.empty(cap, dtype=np.int64)
        self.hv = np.empty(cap, dtype=np.int64)
        self.hd_b = np.empty(cap, dtype=np.float64)
        self.hk_b = np.empty(cap, dtype=np.int64)
        self.hv_b = np.empty(cap, dtype=np.int64)
        self.bound = np.empty(max(beta, 1), dtype=np.float64)

    def ensure_beta(self, beta: int) -> None:
        if self.bound.shape[0] < beta:
            self.bound = np.empty(beta, dtype=np.float64)


# outcome codes of engine_query
Q_SAME = 0
Q_UNREACHABLE = 1
Q_TRIVIAL = 2
Q_INTERSECTION = 3
Q_DISJOINT = 4
Q_NO_BLOCK = 5


@njit(nogil=True, cache=True)
def engine_query(survives, anchor, anchor_weight, block_of, offsets,
                 members, dists, hops, s, t, want_path, out):
    """One dense ``s``-``t`` query up to, but not including, the fallback.

    Returns ``(code, total, meeting position, path length)``.  For
    ``Q_TRIVIAL`` and ``Q_INTERSECTION`` the dense path is written to
    ``out`` when ``want_path`` is set.
    """
    if s == t:
        out[0] = s
        return Q_SAME, 0.0, -1, 1
    rs = s
    rt = t
    ws = 0.0
    wt = 0.0
    if not survives[s]:
        a = anchor[s]
        if a < 0:
            return Q_UNREACHABLE, INF, -1, 0
        if not survives[a]:
            # pair component: the only other reachable node is the partner
            if a == t:
                out[0] = s
                out[1] = t
                return Q_TRIVIAL, anchor_weight[s], -1, 2
            return Q_UNREACHABLE, INF, -1, 0
        rs = a
        ws = anchor_weight[s]
    if not survives[t]:
        a = anchor[t]
        if a < 0 or not survives[a]:
            return Q_UNREACHABLE, INF, -1, 0
        rt = a
        wt = anchor_weight[t]
    if rs == rt:
        n = 0
        out[n] = s
        n += 1
        if rs != s and rs != t:
            out[n] = rs
            n += 1
        out[n] = t
        n += 1
        return Q_TRIVIAL, ws + wt, -1, n
    ba = block_of[rs]
    bb = block_of[rt]
    if ba < 0 or bb < 0:
        return Q_NO_BLOCK, INF, -1, 0
    a0 = offsets[ba]
    a1 = offsets[ba + 1]
    b0 = offsets[bb]
    b1 = offsets[bb + 1]
    if not want_path:
        i, j, best = best_meeting(members, dists, a0, a1, b0, b1)
        if i < 0:
            return Q_DISJOINT, INF, -1, 0
        return Q_INTERSECTION, ws + best + wt, i, 0
    n = 0
    if rs != s:
        out[0] = s
        n = 1
    best, i, plen = meeting_path(members, dists, hops, a0, a1, b0, b1, out[n:])
    if i < 0:
        return Q_DISJOINT, INF, -1, 0
    n += plen
    if rt != t:
        out[n] = t
        n += 1
    return Q_INTERSECTION, ws + best + wt, i, n
