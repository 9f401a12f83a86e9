"""Fat-minor certificates: verification, construction, and bounded search.

A certificate exhibits a small pattern graph inside a host at fatness k:
connected branch sets pairwise k-separated, one simple path per pattern
edge with endpoints in the right branch sets and internals clear of every
branch set, distinct paths pairwise k-separated, and each path k-separated
from every branch set it does not end in.  ``verify_certificate`` checks
all of it exhaustively and is the single source of truth; the construction
and the searcher only ever return certificates it accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from . import kernels
from .graphs import Graph, GraphError, graph_from_json, graph_to_json
from .sources import Window, ball, claw_times_path
from .treedec import Clause, ValidationReport


@dataclass(frozen=True)
class FatMinorCertificate:
    """Witness that ``pattern`` sits inside some host graph at fatness k."""

    pattern: Graph
    branch_sets: dict[int, tuple[int, ...]]
    paths: dict[tuple[int, int], tuple[int, ...]]
    fatness: int

    def __post_init__(self):
        object.__setattr__(
            self,
            "branch_sets",
            {int(v): tuple(int(x) for x in s) for v, s in self.branch_sets.items()},
        )
        object.__setattr__(
            self,
            "paths",
            {
                (min(e), max(e)): tuple(int(x) for x in p)
                for e, p in self.paths.items()
            },
        )

    def to_json(self) -> dict:
        return {
            "pattern": graph_to_json(self.pattern),
            "branch_sets": {str(v): list(s) for v, s in sorted(self.branch_sets.items())},
            "paths": {f"{u}-{v}": list(p) for (u, v), p in sorted(self.paths.items())},
            "k": self.fatness,
        }


def certificate_from_json(obj: dict) -> FatMinorCertificate:
    paths = {}
    for key, p in obj["paths"].items():
        u, _, v = key.partition("-")
        paths[(int(u), int(v))] = tuple(p)
    return FatMinorCertificate(
        pattern=graph_from_json(obj["pattern"]),
        branch_sets={int(v): tuple(s) for v, s in obj["branch_sets"].items()},
        paths=paths,
        fatness=int(obj["k"]),
    )


def _distance_from_set(G: Graph, members) -> np.ndarray:
    src = np.asarray(sorted(members), dtype=np.int32)
    return kernels.multi_source(G._indptr, G._indices, src)


def _min_to(dist: np.ndarray, targets) -> int | None:
    """Smallest distance from the BFS source set to ``targets``; None if unreachable."""
    best = None
    for t in targets:
        d = int(dist[t])
        if d >= 0 and (best is None or d < best):
            best = d
    return best


def verify_certificate(G: Graph, cert: FatMinorCertificate) -> ValidationReport:
    """Exhaustive check of every defining clause; violations are reported
    with witnesses, never raised."""
    report = ValidationReport()
    k = cert.fatness
    H = cert.pattern

    listed = [x for s in cert.branch_sets.values() for x in s]
    listed += [x for p in cert.paths.values() for x in p]
    bad = [x for x in listed if not 0 <= x < G.n]
    report.clauses.append(
        Clause(
            "vertices_in_range",
            not bad,
            None if not bad else f"vertex {bad[0]} outside the host graph",
        )
    )
    if bad:
        return report

    missing = [v for v in range(H.n) if not cert.branch_sets.get(v)]
    report.clauses.append(
        Clause(
            "branch_sets_nonempty",
            not missing,
            None if not missing else f"pattern vertex {missing[0]} has no branch set",
        )
    )

    owner: dict[int, int] = {}
    clash = None
    for v in sorted(cert.branch_sets):
        for x in cert.branch_sets[v]:
            if x in owner:
                clash = f"vertex {x} lies in branch sets {owner[x]} and {v}"
                break
            owner[x] = v
        if clash:
            break
    report.clauses.append(Clause("branch_sets_disjoint", clash is None, clash))

    witness = None
    for v in sorted(cert.branch_sets):
        members = cert.branch_sets[v]
        if not members:
            continue
        mset = set(members)
        seen = {members[0]}
        stack = [members[0]]
        while stack:
            x = stack.pop()
            for y in G.neighbors(x):
                y = int(y)
                if y in mset and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(mset):
            witness = f"branch set {v} is disconnected"
            break
    report.clauses.append(Clause("branch_sets_connected", witness is None, witness))

    set_dist = {
        v: _distance_from_set(G, s) for v, s in cert.branch_sets.items() if s
    }
    witness = None
    verts = sorted(set_dist)
    for i, u in enumerate(verts):
        for v in verts[i + 1 :]:
            d = _min_to(set_dist[u], cert.branch_sets[v])
            if d is not None and d < k:
                witness = f"branch sets {u} and {v} sit {d} apart, need >= {k}"
                break
        if witness:
            break
    report.clauses.append(Clause("branch_separation", witness is None, witness))

    edges = set(H.edges)
    have = set(cert.paths)
    witness = None
    if have != edges:
        extra = sorted(have - edges)
        lacking = sorted(edges - have)
        witness = f"missing paths {lacking[:3]}, foreign paths {extra[:3]}"
    report.clauses.append(Clause("paths_match_edges", witness is None, witness))

    witness = None
    for e in sorted(cert.paths):
        p = cert.paths[e]
        if not p:
            witness = f"path {e} is empty"
            break
        if len(set(p)) != len(p):
            witness = f"path {e} repeats a vertex"
            break
        broken = [
            (x, y) for x, y in zip(p, p[1:]) if not G.has_edge(x, y)
        ]
        if broken:
            witness = f"path {e} jumps a non-edge {broken[0]}"
            break
    report.clauses.append(Clause("paths_simple", witness is None, witness))

    witness = None
    for (u, v), p in sorted(cert.paths.items()):
        if not p:
            continue
        ends = {p[0], p[-1]}
        mu = set(cert.branch_sets.get(u, ()))
        mv = set(cert.branch_sets.get(v, ()))
        head_ok = p[0] in mu and p[-1] in mv
        tail_ok = p[0] in mv and p[-1] in mu
        if len(p) == 1:
            head_ok = tail_ok = False  # one vertex cannot lie in two disjoint sets
        if not (head_ok or tail_ok):
            witness = f"path {(u, v)} endpoints {sorted(ends)} miss their branch sets"
            break
    report.clauses.append(Clause("path_endpoints", witness is None, witness))

    all_branch = set(owner)
    witness = None
    for e in sorted(cert.paths):
        inner = cert.paths[e][1:-1]
        hit = [x for x in inner if x in all_branch]
        if hit:
            witness = f"path {e} passes through branch set {owner[hit[0]]} at {hit[0]}"
            break
    report.clauses.append(
        Clause("path_internals_avoid_branch_sets", witness is None, witness)
    )

    path_dist = {e: _distance_from_set(G, p) for e, p in cert.paths.items() if p}
    witness = None
    keys = sorted(path_dist)
    for i, e in enumerate(keys):
        for e2 in keys[i + 1 :]:
            d = _min_to(path_dist[e], cert.paths[e2])
            if d is not None and d < k:
                witness = f"paths {e} and {e2} sit {d} apart, need >= {k}"
                break
        if witness:
            break
    report.clauses.append(Clause("path_separation", witness is None, witness))

    witness = None
    for e in keys:
        u, v = e
        for w in sorted(cert.branch_sets):
            if w in (u, v) or not cert.branch_sets[w]:
                continue
            d = _min_to(path_dist[e], cert.branch_sets[w])
            if d is not None and d < k:
                witness = f"path {e} sits {d} from branch set {w}, need >= {k}"
                break
        if witness:
            break
    report.clauses.append(Clause("path_branch_separation", witness is None, witness))

    return report


# ---------------------------------------------------------------------------
# Explicit construction: complete bipartite patterns in a claw-times-path window

def claw_construction(m: int, k: int) -> tuple[Window, FatMinorCertificate]:
    """Certificate for K_{m,m} at fatness k inside a claw-times-path window.

    One side of the pattern lives on the spine (the center row): m disjoint
    coordinate segments, each exposing m attachment columns spaced s = max(k,1)
    apart, consecutive segments separated by 3s.  The other side lives at
    depth max(3k,1) on the m rays, each branch set spanning the column range
    of its ray.  Connecting paths drop straight down distinct columns, so
    any two of the m*m paths are at least s apart in the coordinate and the
    product metric keeps every separation clause comfortable.  The window
    radius comes out linear in k.
    """
    if m < 1:
        raise GraphError("pattern side must be >= 1")
    if k < 0:
        raise GraphError("fatness must be >= 0")
    s = max(k, 1)
    gap = 3 * s
    depth = max(3 * k, 1)
    base = [i * ((m - 1) * s + gap) for i in range(m)]
    span = base[m - 1] + (m - 1) * s
    offset = -(span // 2)
    col = [[base[i] + j * s + offset for j in range(m)] for i in range(m)]
    radius = max(depth, span + offset, -offset)

    window = ball(claw_times_path(m), radius)
    ids = window.key_to_id
    center = ()

    branch_sets: dict[int, tuple[int, ...]] = {}
    for i in range(m):
        lo, hi = col[i][0], col[i][m - 1]
        branch_sets[i] = tuple(ids[(center, c)] for c in range(lo, hi + 1))
    for j in range(m):
        lo, hi = col[0][j], col[m - 1][j]
        branch_sets[m + j] = tuple(ids[((j, depth), c)] for c in range(lo, hi + 1))

    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for i in range(m):
        for j in range(m):
            c = col[i][j]
            drop = [ids[(center, c)]]
            drop += [ids[((j, d), c)] for d in range(1, depth + 1)]
            paths[(i, m + j)] = tuple(drop)

    labels = {i: f"spine{i}" for i in range(m)}
    labels.update({m + j: f"ray{j}" for j in range(m)})
    pattern = Graph(
        2 * m, [(i, m + j) for i in range(m) for j in range(m)], labels
    )
    cert = FatMinorCertificate(pattern, branch_sets, paths, k)
    return window, cert


# ---------------------------------------------------------------------------
# Bounded randomized search

def search_fat_minor(
    G: Graph, H: Graph, k: int, budget: int = 1_000_000, seed: int = 0
) -> FatMinorCertificate | None:
    """Seeded greedy search; any returned certificate has been verified.

    Grows branch sets as balls around well-separated seed vertices (radius
    scaled to the pattern degree), then routes one path per pattern edge by
    BFS in the host minus the forbidden zones: the k-1 halo of every other
    branch set and of every already-routed path, and the start set itself so
    internal vertices never re-enter it.  ``budget`` caps the total number
    of vertices all searches may visit; exhaustion returns None, which
    proves nothing.
    """
    if k < 0:
        raise GraphError("fatness must be >= 0")
    if H.n == 0:
        raise GraphError("empty pattern")
    rng = np.random.default_rng(seed)
    grow = [ceil((H.degree(v) - 1) * k / 2) if H.degree(v) > 1 else 0 for v in range(H.n)]
    halo = max(k - 1, 0)
    spent = 0

    while spent < budget:
        picked: list[int] = [int(rng.integers(0, G.n))]
        best = kernels.bfs(G._indptr, G._indices, picked[0])
        spent += int((best >= 0).sum())
        while len(picked) < H.n:
            far = int(np.argmax(best))
            if best[far] <= 0:
                break
            picked.append(far)
            if len(picked) == H.n:
                break
            nxt = kernels.bfs(G._indptr, G._indices, far)
            spent += int((nxt >= 0).sum())
            best = np.minimum(
                np.where(best < 0, np.iinfo(np.int32).max, best),
                np.where(nxt < 0, np.iinfo(np.int32).max, nxt),
            ).astype(np.int32)
        if len(picked) < H.n:
            return None  # host too small for this many seeds

        order = sorted(range(H.n), key=lambda v: -grow[v])
        seat = {v: picked[i] for i, v in enumerate(order)}
        sets: dict[int, tuple[int, ...]] = {}
        halos: dict[int, np.ndarray] = {}
        ok = True
        for v in range(H.n):
            dist = kernels.bfs_limited(G._indptr, G._indices, seat[v], max(grow[v], halo))
            spent += int((dist >= 0).sum())
            sets[v] = tuple(int(x) for x in np.nonzero((dist >= 0) & (dist <= grow[v]))[0])
            halos[v] = (dist >= 0) & (dist <= grow[v] + halo)
        for i in range(H.n):
            for j in range(i + 1, H.n):
                di = kernels.bfs_limited(G._indptr, G._indices, seat[i], grow[i] + grow[j] + k)
                spent += int((di >= 0).sum())
                d = int(di[seat[j]]) if di[seat[j]] >= 0 else -1
                if 0 <= d < grow[i] + grow[j] + k:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            if spent >= budget:
                return None
            continue

        paths: dict[tuple[int, int], tuple[int, ...]] = {}
        routed_halo = np.zeros(G.n, dtype=bool)
        ok = True
        for u, v in sorted(H.edges):
            blocked = np.zeros(G.n, dtype=np.uint8)
            for w in range(H.n):
                if w not in (u, v):
                    blocked[halos[w]] = 1
            blocked[routed_halo] = 1
            start_pool = [x for x in sets[u] if not blocked[x]]
            blocked[list(sets[u])] = 1
            if not start_pool:
                ok = False
                break
            dist, parent = kernels.masked_bfs_tree(
                G._indptr,
                G._indices,
                np.asarray(sorted(start_pool), dtype=np.int32),
                blocked,
            )
            spent += int((dist >= 0).sum())
            target = _min_to_vertex(dist, sets[v])
            if target is None:
                ok = False
                break
            path = [target]
            while parent[path[-1]] >= 0:
                path.append(int(parent[path[-1]]))
            path.reverse()
            paths[(u, v)] = tuple(path)
            if k >= 1:
                reach = kernels.multi_source(
                    G._indptr, G._indices, np.asarray(path, dtype=np.int32)
                )
                spent += int((reach >= 0).sum())
                routed_halo |= (reach >= 0) & (reach <= halo)
            if spent >= budget:
                return None
        if not ok:
            if spent >= budget:
                return None
            continue

        cert = FatMinorCertificate(H, sets, paths, k)
        if verify_certificate(G, cert).ok:
            return cert
    return None


def _min_to_vertex(dist: np.ndarray, targets) -> int | None:
    best = None
    for t in targets:
        d = int(dist[t])
        if d >= 0 and (best is None or d < dist[best]):
            best = t
    return best
