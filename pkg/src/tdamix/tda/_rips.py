"""Implicit Vietoris-Rips persistence in dimensions 0 and 1.

Edges are ranked by (length, i, j). A triangle is keyed by
``rank(longest edge) * n + third vertex``, which places every triangle right
after its longest edge in a valid simplexwise filtration. H0 comes from a
union-find pass; H1 from persistent cohomology over Z/2 with the H0 death
edges cleared. An edge owning a triangle whose longest edge is itself is
paired immediately (zero persistence): nothing processed earlier can hold
that triangle as a pivot.
"""

import heapq

import numba
import numpy as np
from numba import types
from numba.typed import Dict


@numba.njit(cache=True, nogil=True)
def _edges(points, thresh):
    n = points.shape[0]
    cnt = 0
    cap = 1024
    ii = np.empty(cap, np.int32)
    jj = np.empty(cap, np.int32)
    dd = np.empty(cap, np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for c in range(points.shape[1]):
                diff = points[i, c] - points[j, c]
                s += diff * diff
            d = np.sqrt(s)
            if d <= thresh:
                if cnt == cap:
                    cap *= 2
                    ii2 = np.empty(cap, np.int32)
                    jj2 = np.empty(cap, np.int32)
                    dd2 = np.empty(cap, np.float64)
                    ii2[:cnt] = ii[:cnt]
                    jj2[:cnt] = jj[:cnt]
                    dd2[:cnt] = dd[:cnt]
                    ii, jj, dd = ii2, jj2, dd2
                ii[cnt] = i
                jj[cnt] = j
                dd[cnt] = d
                cnt += 1
    return ii[:cnt], jj[:cnt], dd[:cnt]


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True, nogil=True)
def _push_coboundary(heap, rank, ei, ej, r, n):
    i = ei[r]
    j = ej[r]
    for k in range(n):
        if k == i or k == j:
            continue
        a = rank[i, k]
        b = rank[j, k]
        if a < 0 or b < 0:
            continue
        m = r
        if a > m:
            m = a
        if b > m:
            m = b
        # third vertex = the one not on the longest edge
        if m == r:
            third = k
        elif m == a:
            third = j
        else:
            third = i
        heapq.heappush(heap, np.int64(m) * n + third)


@numba.njit(cache=True, nogil=True)
def _pop_pivot(heap):
    # Z/2 coefficients: equal keys cancel in pairs
    while len(heap) > 0:
        p = heapq.heappop(heap)
        c = 1
        while len(heap) > 0 and heap[0] == p:
            heapq.heappop(heap)
            c += 1
        if c % 2 == 1:
            return p
    return np.int64(-1)


@numba.njit(cache=True, nogil=True)
def _persistence(n, ei, ej, ed, rank, want_h1):
    E = ei.shape[0]
    parent = np.arange(n)
    death_edge = np.zeros(E, np.bool_)
    h0 = np.empty(max(n - 1, 0), np.float64)
    nh0 = 0
    for r in range(E):
        a = _find(parent, ei[r])
        b = _find(parent, ej[r])
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
            death_edge[r] = True
            h0[nh0] = ed[r]
            nh0 += 1

    h1b = np.empty(16, np.float64)
    h1d = np.empty(16, np.float64)
    nh1 = 0
    if not want_h1:
        return h0[:nh0], h1b[:0], h1d[:0]

    pivot_of = Dict.empty(key_type=types.int64, value_type=types.int64)
    reduction = Dict.empty(key_type=types.int64, value_type=types.int64[:])
    for r in range(E - 1, -1, -1):
        if death_edge[r]:
            continue
        i = ei[r]
        j = ej[r]
        # apparent pair: smallest triangle whose longest edge is r
        found = -1
        for k in range(n):
            if k == i or k == j:
                continue
            a = rank[i, k]
            b = rank[j, k]
            if a >= 0 and b >= 0 and a < r and b < r:
                found = k
                break
        if found >= 0:
            pivot_of[np.int64(r) * n + found] = r
            continue

        heap = [np.int64(0)]
        heap.pop()
        _push_coboundary(heap, rank, ei, ej, r, n)
        vcol = [np.int64(r)]
        while True:
            p = _pop_pivot(heap)
            if p < 0:
                # essential class
                if nh1 == h1b.shape[0]:
                    h1b = np.concatenate((h1b, np.empty(nh1, np.float64)))
                    h1d = np.concatenate((h1d, np.empty(nh1, np.float64)))
                h1b[nh1] = ed[r]
                h1d[nh1] = np.inf
                nh1 += 1
                break
            if p in pivot_of:
                heapq.heappush(heap, p)
                r2 = pivot_of[p]
                if r2 in reduction:
                    col = reduction[r2]
                    for q in range(col.shape[0]):
                        vcol.append(col[q])
                        _push_coboundary(heap, rank, ei, ej, col[q], n)
                else:
                    vcol.append(np.int64(r2))
                    _push_coboundary(heap, rank, ei, ej, r2, n)
                continue
            pivot_of[p] = r
            if len(vcol) > 1:
                arr = np.sort(np.array(vcol))
                keep = []
                q = 0
                while q < arr.shape[0]:
                    c = 1
                    while q + c < arr.shape[0] and arr[q + c] == arr[q]:
                        c += 1
                    if c % 2 == 1:
                        keep.append(arr[q])
                    q += c
                reduction[np.int64(r)] = np.array(keep)
            death = ed[p // n]
            if death > ed[r]:
                if nh1 == h1b.shape[0]:
                    h1b = np.concatenate((h1b, np.empty(nh1, np.float64)))
                    h1d = np.concatenate((h1d, np.empty(nh1, np.float64)))
                h1b[nh1] = ed[r]
                h1d[nh1] = death
                nh1 += 1
            break
    return h0[:nh0], h1b[:nh1], h1d[:nh1]


def rips_pairs(points, max_scale: float, max_dim: int = 1):
    """Finite H0 deaths, plus H1 (birth, death) arrays, of the Rips filtration.

    Returns ``(h0_deaths, n_components, h1_births, h1_deaths)``; zero-length
    pairs are omitted and H1 deaths may be ``inf``.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = len(pts)
    ii, jj, dd = _edges(pts, float(max_scale))
    order = np.lexsort((jj, ii, dd))
    ei = np.ascontiguousarray(ii[order])
    ej = np.ascontiguousarray(jj[order])
    ed = np.ascontiguousarray(dd[order])
    if max_dim >= 1:
        rank = np.full((n, n), -1, dtype=np.int32 if len(ed) < 2**31 else np.int64)
        rank[ei, ej] = np.arange(len(ed))
        rank[ej, ei] = np.arange(len(ed))
    else:
        rank = np.full((1, 1), -1, dtype=np.int32)
    h0, h1b, h1d = _persistence(n, ei.astype(np.int64), ej.astype(np.int64), ed, rank, max_dim >= 1)
    n_components = n - len(h0)
    return h0[h0 > 0], n_components, h1b, h1d
