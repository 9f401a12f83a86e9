# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS kernels; semantics identical to ``_pykernels``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8


def bfs(i32[::1] indptr, i32[::1] indices, int source):
    cdef int n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = out
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0, u, v, j, du
    dist[source] = 0
    queue[tail] = source
    tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return out


def bfs_limited(i32[::1] indptr, i32[::1] indices, int source, int limit):
    cdef int n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = out
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0, u, v, j, du
    dist[source] = 0
    queue[tail] = source
    tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= limit:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return out


def multi_source(i32[::1] indptr, i32[::1] indices, i32[::1] sources):
    cdef int n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = out
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0, u, v, j, du, k
    for k in range(sources.shape[0]):
        u = sources[k]
        if dist[u] < 0:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return out


def masked_bfs_tree(i32[::1] indptr, i32[::1] indices, i32[::1] sources, u8[::1] blocked):
    cdef int n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    parent_arr = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = dist_arr
    cdef i32[::1] parent = parent_arr
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0, u, v, j, du, k
    # Sources enter the queue even when blocked; expansion respects the mask.
    for k in range(sources.shape[0]):
        u = sources[k]
        if dist[u] < 0:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0 and blocked[v] == 0:
                    dist[v] = du + 1
                    parent[v] = u
                    queue[tail] = v
                    tail += 1
    return dist_arr, parent_arr


def set_diameter(i32[::1] indptr, i32[::1] indices, i32[::1] members):
    cdef int n = indptr.shape[0] - 1
    cdef int m = members.shape[0]
    member_arr = np.zeros(n, dtype=np.uint8)
    cdef u8[::1] is_member = member_arr
    cdef i32[::1] dist = np.empty(n, dtype=np.int32)
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head, tail, u, v, j, du, k, s, remaining, reach, best = 0
    cdef int failed = 0
    for k in range(m):
        is_member[members[k]] = 1
    with nogil:
        for k in range(m):
            s = members[k]
            for u in range(n):
                dist[u] = -1
            dist[s] = 0
            remaining = m - 1
            reach = 0
            head = 0
            tail = 1
            queue[0] = s
            while head < tail and remaining > 0:
                u = queue[head]
                head += 1
                du = dist[u]
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        dist[v] = du + 1
                        if is_member[v]:
                            remaining -= 1
                            reach = du + 1
                            if remaining == 0:
                                break
                        queue[tail] = v
                        tail += 1
            if remaining > 0:
                failed = 1
                break
            if reach > best:
                best = reach
    if failed:
        return -2
    return best


def voronoi_min_separation(i32[::1] indptr, i32[::1] indices, i32[::1] owner):
    cdef int n = indptr.shape[0] - 1
    cdef i32[::1] dist = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] own = np.array(owner, dtype=np.int32, copy=True)
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0, u, v, j, du, cand
    cdef int best = -1, bu = -1, bv = -1
    for u in range(n):
        if own[u] >= 0:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    own[v] = own[u]
                    queue[tail] = v
                    tail += 1
        for u in range(n):
            if dist[u] < 0:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] >= 0 and own[u] != own[v]:
                    cand = dist[u] + dist[v] + 1
                    if best < 0 or cand < best:
                        best = cand
                        bu = u
                        bv = v
    return best, bu, bv


def apsp_rows(i32[::1] indptr, i32[::1] indices, i32[:, ::1] out, int start, int stop):
    cdef int n = indptr.shape[0] - 1
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head, tail, u, v, j, du, s
    with nogil:
        for s in range(start, stop):
            for u in range(n):
                out[s, u] = -1
            out[s, s] = 0
            head = 0
            tail = 1
            queue[0] = s
            while head < tail:
                u = queue[head]
                head += 1
                du = out[s, u]
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if out[s, v] < 0:
                        out[s, v] = du + 1
                        queue[tail] = v
                        tail += 1
