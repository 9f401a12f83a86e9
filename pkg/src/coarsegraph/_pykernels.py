"""Pure-Python breadth-first-search kernels.

Reference implementation of the hot loops; ``kernels`` prefers the compiled
extension with identical semantics.  All functions take CSR adjacency
(``indptr`` of length n+1, ``indices`` of length 2m, neighbors sorted
ascending) and use -1 as the internal not-reached code.  Public wrappers in
``graphs`` translate that code to the Unreachable marker.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def bfs(indptr, indices, source: int) -> np.ndarray:
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def bfs_limited(indptr, indices, source: int, limit: int) -> np.ndarray:
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= limit:
            continue
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def multi_source(indptr, indices, sources) -> np.ndarray:
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(int(s))
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def masked_bfs_tree(indptr, indices, sources, blocked) -> tuple[np.ndarray, np.ndarray]:
    """Multi-source BFS that never expands into blocked vertices.

    Returns (dist, parent); parent of a source is -1.  Sources are admitted
    even when flagged blocked (a search may start inside a region it must not
    re-enter), but expansion only ever reaches unblocked vertices.
    Deterministic: FIFO queue, neighbors scanned in CSR (ascending) order.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    parent = np.full(n, -1, dtype=np.int32)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(int(s))
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0 and not blocked[v]:
                dist[v] = du + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def set_diameter(indptr, indices, members) -> int:
    """Largest pairwise distance among ``members``; -2 if some pair is unreachable.

    One early-terminated BFS per member: each run stops as soon as every
    member has been reached.
    """
    n = len(indptr) - 1
    is_member = np.zeros(n, dtype=bool)
    is_member[members] = True
    total = int(is_member.sum())
    best = 0
    dist = np.full(n, -1, dtype=np.int32)
    for s in members:
        dist[:] = -1
        dist[s] = 0
        remaining = total - 1
        reach = 0
        queue = deque([int(s)])
        while queue and remaining:
            u = queue.popleft()
            du = dist[u]
            for v in indices[indptr[u] : indptr[u + 1]]:
                if dist[v] < 0:
                    dist[v] = du + 1
                    if is_member[v]:
                        remaining -= 1
                        reach = du + 1
                        if not remaining:
                            break
                    queue.append(v)
        if remaining:
            return -2
        if reach > best:
            best = reach
    return best


def voronoi_min_separation(indptr, indices, owner) -> tuple[int, int, int]:
    """Exact minimum distance between vertices of distinct owner classes.

    ``owner[v] >= 0`` marks cluster membership.  Returns ``(d, u, v)`` where u, v
    are endpoints of an edge witnessing the minimizing path (their owners give
    the closest pair of clusters), or ``(-1, -1, -1)`` when no two distinct
    clusters see each other.  Uses the nearest-cluster Voronoi labelling: the
    minimum over cross-label edges of d(u) + d(v) + 1 equals the true minimum
    pairwise cluster separation.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    own = np.array(owner, dtype=np.int32, copy=True)
    queue = deque()
    for v in range(n):
        if own[v] >= 0:
            dist[v] = 0
            queue.append(v)
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                own[v] = own[u]
                queue.append(v)
    best = -1
    bu = bv = -1
    for u in range(n):
        if dist[u] < 0:
            continue
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] >= 0 and own[u] != own[v] and own[v] >= 0 and own[u] >= 0:
                cand = int(dist[u]) + int(dist[v]) + 1
                if best < 0 or cand < best:
                    best = cand
                    bu, bv = u, v
    return best, bu, bv


def apsp_rows(indptr, indices, out, start: int, stop: int) -> None:
    """Fill rows [start, stop) of the all-pairs distance table."""
    for s in range(start, stop):
        out[s, :] = bfs(indptr, indices, s)
