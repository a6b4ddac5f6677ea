"""Hot inner loops.

Every kernel has a numba ``@njit`` implementation and a pure-numpy twin.
The numba path is used when numba imports cleanly and the environment
variable ``WIRECODES_NO_NUMBA`` is unset (or ``0``).  Both paths return
identical results; the test suite runs each kernel through both.
"""

import heapq
import itertools
import os
from collections import deque
from contextlib import contextmanager

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

USE_NUMBA = nb is not None and os.environ.get("WIRECODES_NO_NUMBA", "0").lower() in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"

_ONE = np.uint64(1)


@contextmanager
def use_backend(name):
    """Temporarily force ``"numba"`` or ``"numpy"`` (tests and benchmarks)."""
    global USE_NUMBA, BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and nb is None:
        raise RuntimeError("numba is not installed")
    saved = USE_NUMBA, BACKEND
    USE_NUMBA, BACKEND = name == "numba", name
    try:
        yield
    finally:
        USE_NUMBA, BACKEND = saved


# ---------------------------------------------------------------------------
# bit packing
# ---------------------------------------------------------------------------

def pack_rows(bits):
    """Pack a (m, ncols) 0/1 array into (m, ceil(ncols/64)) uint64 words (little-endian bits)."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    m, ncols = bits.shape
    nwords = max(1, (ncols + 63) // 64)
    padded = np.zeros((m, nwords * 64), dtype=np.uint8)
    padded[:, :ncols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(m, nwords)


def unpack_rows(words, ncols):
    words = np.ascontiguousarray(words, dtype=np.uint64)
    m = words.shape[0]
    if m == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = words.view(np.uint8).reshape(m, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :ncols]


# ---------------------------------------------------------------------------
# GF(2) reduced row echelon form
# ---------------------------------------------------------------------------

def _rref_numpy(words, ncols):
    rows = words.copy()
    m = rows.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        w = c >> 6
        bit = _ONE << np.uint64(c & 63)
        below = np.flatnonzero(rows[r:, w] & bit)
        if below.size == 0:
            continue
        p = r + below[0]
        if p != r:
            rows[[r, p]] = rows[[p, r]]
        hit = np.flatnonzero(rows[:, w] & bit)
        hit = hit[hit != r]
        if hit.size:
            rows[hit] ^= rows[r]
        pivots.append(c)
        r += 1
    return rows[:r], np.array(pivots, dtype=np.int64)


if nb is not None:

    @nb.njit(cache=True)
    def _rref_nb(words, ncols):
        rows = words.copy()
        m, nw = rows.shape
        pivots = np.empty(min(m, ncols), dtype=np.int64)
        r = 0
        for c in range(ncols):
            if r == m:
                break
            w = c >> 6
            bit = np.uint64(1) << np.uint64(c & 63)
            p = -1
            for i in range(r, m):
                if rows[i, w] & bit:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for k in range(nw):
                    t = rows[r, k]
                    rows[r, k] = rows[p, k]
                    rows[p, k] = t
            for i in range(m):
                if i != r and (rows[i, w] & bit):
                    for k in range(w, nw):
                        rows[i, k] ^= rows[r, k]
            pivots[r] = c
            r += 1
        return rows[:r].copy(), pivots[:r].copy()


def rref(words, ncols):
    """Reduced row echelon form of a packed GF(2) matrix.

    Returns ``(reduced_rows, pivot_columns)``; the number of rows returned is the rank.
    """
    words = np.ascontiguousarray(words, dtype=np.uint64)
    if words.shape[0] == 0 or ncols == 0:
        return words[:0].copy(), np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _rref_nb(words, ncols)
    return _rref_numpy(words, ncols)


# ---------------------------------------------------------------------------
# minimum-weight dressed logical search
# ---------------------------------------------------------------------------
#
# masks_s[i, t] / masks_l[i, t]: anticommutation pattern of the single-qubit
# Pauli t (0=X, 1=Y, 2=Z) on qubit i against the stabilizer rows and the
# bare-logical rows.  A weight-w operator is a dressed logical iff the XOR of
# its stabilizer masks vanishes and the XOR of its logical masks does not.

def _first_logical_numpy(masks_s, masks_l, w):
    n = masks_s.shape[0]
    assign = np.array(list(itertools.product(range(3), repeat=w)), dtype=np.int64)
    for combo in itertools.combinations(range(n), w):
        acc_s = np.zeros((assign.shape[0], masks_s.shape[2]), dtype=np.uint64)
        acc_l = np.zeros((assign.shape[0], masks_l.shape[2]), dtype=np.uint64)
        for j, q in enumerate(combo):
            acc_s ^= masks_s[q, assign[:, j]]
            acc_l ^= masks_l[q, assign[:, j]]
        ok = ~acc_s.any(axis=1) & acc_l.any(axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            return np.array(combo, dtype=np.int64), assign[hit[0]].copy()
    return None


if nb is not None:

    @nb.njit(cache=True)
    def _first_logical_nb(masks_s, masks_l, w):
        n = masks_s.shape[0]
        ws = masks_s.shape[2]
        wl = masks_l.shape[2]
        combo = np.arange(w)
        types = np.zeros(w, dtype=np.int64)
        acc_s = np.zeros(ws, dtype=np.uint64)
        acc_l = np.zeros(wl, dtype=np.uint64)
        total = 3 ** w
        while True:
            for a in range(total):
                x = a
                for j in range(w - 1, -1, -1):
                    types[j] = x % 3
                    x //= 3
                for k in range(ws):
                    acc_s[k] = 0
                for k in range(wl):
                    acc_l[k] = 0
                for j in range(w):
                    q = combo[j]
                    t = types[j]
                    for k in range(ws):
                        acc_s[k] ^= masks_s[q, t, k]
                    for k in range(wl):
                        acc_l[k] ^= masks_l[q, t, k]
                zero = True
                for k in range(ws):
                    if acc_s[k] != 0:
                        zero = False
                        break
                if not zero:
                    continue
                for k in range(wl):
                    if acc_l[k] != 0:
                        return True, combo.copy(), types.copy()
            # next combination in lexicographic order
            i = w - 1
            while i >= 0 and combo[i] == n - w + i:
                i -= 1
            if i < 0:
                break
            combo[i] += 1
            for j in range(i + 1, w):
                combo[j] = combo[j - 1] + 1
        return False, combo, types


def first_logical(masks_s, masks_l, w):
    """First (lexicographic) weight-``w`` dressed logical, or ``None``.

    Returns ``(qubits, types)`` with types coded 0=X, 1=Y, 2=Z.
    """
    n = masks_s.shape[0]
    if w < 1 or w > n:
        return None
    if USE_NUMBA:
        found, combo, types = _first_logical_nb(
            np.ascontiguousarray(masks_s), np.ascontiguousarray(masks_l), w
        )
        if not found:
            return None
        return combo, types
    return _first_logical_numpy(masks_s, masks_l, w)


# ---------------------------------------------------------------------------
# breadth-first path search with capacity-1 blocking
# ---------------------------------------------------------------------------

def _bfs_numpy(indptr, indices, eids, src, dst, vblock, eused):
    nv = indptr.shape[0] - 1
    parent = np.full(nv, -1, dtype=np.int64)
    parent[src] = src
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if parent[v] >= 0 or eused[eids[k]]:
                continue
            if vblock[v] and v != dst:
                continue
            parent[v] = u
            queue.append(v)
    if parent[dst] < 0:
        return np.zeros(0, dtype=np.int64)
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    return np.array(path[::-1], dtype=np.int64)


if nb is not None:

    @nb.njit(cache=True)
    def _bfs_nb(indptr, indices, eids, src, dst, vblock, eused):
        nv = indptr.shape[0] - 1
        parent = np.full(nv, -1, dtype=np.int64)
        queue = np.empty(nv, dtype=np.int64)
        head = 0
        tail = 0
        parent[src] = src
        queue[tail] = src
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            if u == dst:
                break
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if parent[v] >= 0 or eused[eids[k]]:
                    continue
                if vblock[v] and v != dst:
                    continue
                parent[v] = u
                queue[tail] = v
                tail += 1
        if parent[dst] < 0:
            return np.zeros(0, dtype=np.int64)
        length = 1
        v = dst
        while v != src:
            v = parent[v]
            length += 1
        path = np.empty(length, dtype=np.int64)
        v = dst
        for i in range(length - 1, -1, -1):
            path[i] = v
            v = parent[v]
        return path


def bfs_path(indptr, indices, eids, src, dst, vblock, eused):
    """Shortest path src->dst avoiding used edges and blocked vertices (dst exempt).

    Returns the vertex sequence, empty if unreachable.
    """
    if USE_NUMBA:
        return _bfs_nb(indptr, indices, eids, np.int64(src), np.int64(dst), vblock, eused)
    return _bfs_numpy(indptr, indices, eids, int(src), int(dst), vblock, eused)


# ---------------------------------------------------------------------------
# weighted shortest path and negotiated-congestion routing
# ---------------------------------------------------------------------------
#
# Entering vertex v over edge e costs ecost[e] + vcost[v].  Blocked vertices
# (except dst) and blocked edges are never used.  Both backends push
# (distance, vertex) tuples on a binary heap, so ties break identically.

def _dijkstra_core(indptr, indices, eids, src, dst, ecost, vcost, vblock, eblock):
    nv = indptr.shape[0] - 1
    dist = np.full(nv, np.inf)
    parent = np.full(nv, -1, dtype=np.int64)
    pedge = np.full(nv, -1, dtype=np.int64)
    done = np.zeros(nv, dtype=np.bool_)
    dist[src] = 0.0
    parent[src] = src
    heap = [(0.0, src)]
    while len(heap) > 0:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == dst:
            break
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            e = eids[k]
            if done[v] or eblock[e] or (vblock[v] and v != dst):
                continue
            nd = d + ecost[e] + vcost[v]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                pedge[v] = e
                heapq.heappush(heap, (nd, v))
    if not done[dst]:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    length = 1
    v = dst
    while v != src:
        v = parent[v]
        length += 1
    path = np.empty(length, dtype=np.int64)
    edges = np.empty(length - 1, dtype=np.int64)
    v = dst
    for i in range(length - 1, -1, -1):
        path[i] = v
        if i > 0:
            edges[i - 1] = pedge[v]
        v = parent[v]
    return path, edges


def _make_negotiate(dijkstra):
    def negotiate(indptr, indices, eids, srcs, dsts, vblock, eblock, own_v_ptr, own_v, own_e_ptr, own_e,
                  vertex_mode, orders, pres0, pres_growth, hist_inc):
        n_v = indptr.shape[0] - 1
        n_e = eblock.shape[0]
        l = srcs.shape[0]
        hist_e = np.zeros(n_e)
        occ_e = np.zeros(n_e)
        hist_v = np.zeros(n_v)
        occ_v = np.zeros(n_v)
        ecost = np.ones(n_e)
        vcost = np.zeros(n_v)
        paths = [np.zeros(0, dtype=np.int64) for _ in range(l)]
        pedges = [np.zeros(0, dtype=np.int64) for _ in range(l)]
        routed = np.zeros(l, dtype=np.bool_)
        pres = pres0
        for it in range(orders.shape[0]):
            for e in range(n_e):
                ecost[e] = (1.0 + hist_e[e]) * (1.0 + pres * occ_e[e])
            if vertex_mode:
                for v in range(n_v):
                    vcost[v] = (1.0 + hist_v[v]) * (1.0 + pres * occ_v[v]) - 1.0
            for j in range(l):
                i = orders[it, j]
                if routed[i]:
                    for e in pedges[i]:
                        occ_e[e] -= 1.0
                        ecost[e] = (1.0 + hist_e[e]) * (1.0 + pres * occ_e[e])
                    p = paths[i]
                    for t in range(1, p.shape[0] - 1):
                        occ_v[p[t]] -= 1.0
                        if vertex_mode:
                            vcost[p[t]] = (1.0 + hist_v[p[t]]) * (1.0 + pres * occ_v[p[t]]) - 1.0
                for t in range(own_v_ptr[i], own_v_ptr[i + 1]):
                    vblock[own_v[t]] = False
                for t in range(own_e_ptr[i], own_e_ptr[i + 1]):
                    eblock[own_e[t]] = False
                p, pe = dijkstra(indptr, indices, eids, srcs[i], dsts[i], ecost, vcost, vblock, eblock)
                for t in range(own_v_ptr[i], own_v_ptr[i + 1]):
                    vblock[own_v[t]] = True
                for t in range(own_e_ptr[i], own_e_ptr[i + 1]):
                    eblock[own_e[t]] = True
                if p.shape[0] == 0:
                    return False, i, paths
                paths[i] = p
                pedges[i] = pe
                routed[i] = True
                for e in pe:
                    occ_e[e] += 1.0
                    ecost[e] = (1.0 + hist_e[e]) * (1.0 + pres * occ_e[e])
                for t in range(1, p.shape[0] - 1):
                    occ_v[p[t]] += 1.0
                    if vertex_mode:
                        vcost[p[t]] = (1.0 + hist_v[p[t]]) * (1.0 + pres * occ_v[p[t]]) - 1.0
            clean = True
            for e in range(n_e):
                if occ_e[e] > 1.0:
                    clean = False
                    hist_e[e] += hist_inc * (occ_e[e] - 1.0)
            if vertex_mode:
                for v in range(n_v):
                    if occ_v[v] > 1.0:
                        clean = False
                        hist_v[v] += hist_inc * (occ_v[v] - 1.0)
            if clean:
                return True, -1, paths
            pres *= pres_growth
        worst = 0
        worst_load = -1.0
        for i in range(l):
            for e in pedges[i]:
                if occ_e[e] > worst_load:
                    worst_load = occ_e[e]
                    worst = i
        return False, worst, paths

    return negotiate


_negotiate_numpy = _make_negotiate(_dijkstra_core)

if nb is not None:
    _dijkstra_core_nb = nb.njit(cache=True)(_dijkstra_core)
    _negotiate_nb = nb.njit(_make_negotiate(_dijkstra_core_nb))


def dijkstra_path(indptr, indices, eids, src, dst, ecost, vcost, vblock, eblock):
    """Cheapest src->dst vertex path; empty array if dst is unreachable."""
    ecost = np.ascontiguousarray(ecost, dtype=np.float64)
    vcost = np.ascontiguousarray(vcost, dtype=np.float64)
    vblock = np.ascontiguousarray(vblock, dtype=np.bool_)
    eblock = np.ascontiguousarray(eblock, dtype=np.bool_)
    if USE_NUMBA:
        return _dijkstra_core_nb(indptr, indices, eids, np.int64(src), np.int64(dst), ecost, vcost, vblock, eblock)[0]
    return _dijkstra_core(indptr, indices, eids, int(src), int(dst), ecost, vcost, vblock, eblock)[0]


def negotiate_routes(indptr, indices, eids, srcs, dsts, vblock, eblock, own_v, own_e, vertex_mode, orders,
                     pres0=0.5, pres_growth=1.15, hist_inc=1.0):
    """Rip-up-and-reroute until no edge (and, in vertex mode, no interior vertex) is shared.

    ``own_v`` / ``own_e`` list per pair the vertices/edges only that pair may
    use; ``orders[it]`` is the visiting order in iteration ``it``.  Returns
    ``(ok, failing_pair, paths)``.
    """
    def flat(groups):
        ptr = np.zeros(len(groups) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(g) for g in groups])
        idx = np.concatenate([np.asarray(g, dtype=np.int64) for g in groups]) if groups else np.zeros(0, np.int64)
        return ptr, idx.astype(np.int64)

    vptr, vidx = flat(own_v)
    eptr, eidx = flat(own_e)
    args = (
        indptr, indices, eids,
        np.asarray(srcs, dtype=np.int64), np.asarray(dsts, dtype=np.int64),
        np.array(vblock, dtype=np.bool_), np.array(eblock, dtype=np.bool_),
        vptr, vidx, eptr, eidx, bool(vertex_mode),
        np.ascontiguousarray(orders, dtype=np.int64), float(pres0), float(pres_growth), float(hist_inc),
    )
    if USE_NUMBA:
        ok, fail, paths = _negotiate_nb(*args)
    else:
        ok, fail, paths = _negotiate_numpy(*args)
    return bool(ok), int(fail), [np.asarray(p) for p in paths]
