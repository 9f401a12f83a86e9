"""Core graph type, exact distance oracles, and metric graph operations.

Vertices are dense integers ``0..n-1``.  Edges are canonical ``(u, v)`` pairs
with ``u < v``, sorted lexicographically, no duplicates, no loops.  Distances
are exact non-negative integers; unreachable pairs are reported as the
explicit :data:`UNREACHABLE` marker (``math.inf``), never a sentinel integer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import kernels

UNREACHABLE = math.inf


class GraphError(ValueError):
    """Raised for malformed graphs or invalid operation inputs."""


def _public_distances(raw: np.ndarray) -> np.ndarray:
    """Translate the internal -1 code to the UNREACHABLE marker."""
    out = raw.astype(np.float64)
    out[raw < 0] = UNREACHABLE
    return out


class Graph:
    """Immutable undirected graph with CSR adjacency.

    ``labels`` is an optional vertex -> string map carrying provenance
    (source coordinates, copy indices, subdivision positions).  It never
    affects the metric.
    """

    __slots__ = ("n", "edges", "labels", "_indptr", "_indices", "_edge_set", "_apsp")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        labels: Mapping[int, str] | None = None,
    ):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphError("edges must be pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphError("edge endpoint out of range")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise GraphError("loops are not allowed")
        lo = arr.min(axis=1)
        hi = arr.max(axis=1)
        canon = np.column_stack([lo, hi])
        order = np.lexsort((canon[:, 1], canon[:, 0]))
        canon = canon[order]
        if len(canon) > 1 and np.any(np.all(canon[1:] == canon[:-1], axis=1)):
            raise GraphError("duplicate edges are not allowed")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(map(tuple, canon.tolist()))
        if labels:
            bad = [v for v in labels if not (0 <= int(v) < n)]
            if bad:
                raise GraphError(f"label keys out of range: {bad[:3]}")
            self.labels = {int(v): str(s) for v, s in labels.items()}
        else:
            self.labels = {}
        # CSR with neighbor lists sorted ascending (determinism of BFS orders).
        m = len(canon)
        endpoints = np.concatenate([canon[:, 0], canon[:, 1]]) if m else np.empty(0, dtype=np.int64)
        others = np.concatenate([canon[:, 1], canon[:, 0]]) if m else np.empty(0, dtype=np.int64)
        order2 = np.lexsort((others, endpoints))
        self._indptr = np.zeros(n + 1, dtype=np.int32)
        np.add.at(self._indptr, endpoints + 1, 1)
        np.cumsum(self._indptr, out=self._indptr)
        self._indices = others[order2].astype(np.int32)
        self._edge_set: frozenset[tuple[int, int]] | None = None
        self._apsp: np.ndarray | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        if self._edge_set is None:
            self._edge_set = frozenset(self.edges)
        return self._edge_set

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return ((u, v) if u < v else (v, u)) in self.edge_set

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return int(np.max(self._indptr[1:] - self._indptr[:-1]))

    def relabel(self, labels: Mapping[int, str]) -> "Graph":
        return Graph(self.n, self.edges, labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def bfs_distances(G: Graph, source: int) -> np.ndarray:
    """Exact distances from ``source``; UNREACHABLE where no path exists."""
    if not 0 <= source < G.n:
        raise GraphError("source out of range")
    return _public_distances(kernels.bfs(G._indptr, G._indices, source))


def multi_source_distances(G: Graph, sources) -> np.ndarray:
    """Distance to the nearest of ``sources``; UNREACHABLE where none."""
    src = np.asarray(sorted(set(int(s) for s in sources)), dtype=np.int32)
    if src.size == 0:
        raise GraphError("need at least one source")
    if src[0] < 0 or src[-1] >= G.n:
        raise GraphError("source out of range")
    return _public_distances(kernels.multi_source(G._indptr, G._indices, src))


def _apsp_raw(G: Graph, threads: int = 1) -> np.ndarray:
    if G._apsp is not None:
        return G._apsp
    n = G.n
    out = np.empty((n, n), dtype=np.int32)
    if threads > 1 and n > 256:
        from concurrent.futures import ThreadPoolExecutor

        bounds = np.linspace(0, n, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(kernels.apsp_rows, G._indptr, G._indices, out, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if a < b
            ]
            for f in futs:
                f.result()
    else:
        kernels.apsp_rows(G._indptr, G._indices, out, 0, n)
    G._apsp = out
    return out


class DistanceOracle:
    """Exact all-pairs distance table for one graph.

    Row order is schedule-independent: the table is identical for any thread
    count.
    """

    def __init__(self, G: Graph, threads: int = 1):
        self.graph = G
        self._raw = _apsp_raw(G, threads)

    def distance(self, u: int, v: int) -> int | float:
        d = int(self._raw[u, v])
        return UNREACHABLE if d < 0 else d

    @property
    def matrix(self) -> np.ndarray:
        """Float matrix with UNREACHABLE (inf) for disconnected pairs."""
        return _public_distances(self._raw)

    def row(self, u: int) -> np.ndarray:
        return _public_distances(self._raw[u])

    def eccentricity(self, u: int) -> int | float:
        row = self._raw[u]
        if np.any(row < 0):
            return UNREACHABLE
        return int(row.max())


def all_pairs_distances(G: Graph, threads: int = 1) -> DistanceOracle:
    return DistanceOracle(G, threads=threads)


def is_connected(G: Graph) -> bool:
    if G.n <= 1:
        return True
    return bool(np.all(kernels.bfs(G._indptr, G._indices, 0) >= 0))


def connected_components(G: Graph) -> list[list[int]]:
    seen = np.zeros(G.n, dtype=bool)
    comps = []
    for s in range(G.n):
        if seen[s]:
            continue
        d = kernels.bfs(G._indptr, G._indices, s)
        members = np.flatnonzero(d >= 0)
        seen[members] = True
        comps.append(members.tolist())
    return comps


def subset_diameter(G: Graph, subset: Iterable[int]) -> int | float:
    """Largest pairwise distance (in G) among the subset; 0 for size <= 1."""
    members = np.unique(np.asarray(list(subset), dtype=np.int32))
    if members.size and (members[0] < 0 or members[-1] >= G.n):
        raise GraphError("subset vertex out of range")
    if members.size <= 1:
        return 0
    d = kernels.set_diameter(G._indptr, G._indices, members)
    return UNREACHABLE if d == -2 else int(d)


def _label(G: Graph, v: int) -> str:
    return G.labels.get(v, str(v))


def power(G: Graph, k: int) -> Graph:
    """Graph with the same vertices, edges between pairs at distance 1..k."""
    if k < 1:
        raise GraphError("power exponent must be >= 1")
    if k == 1:
        return Graph(G.n, G.edges, G.labels)
    pairs = []
    for s in range(G.n):
        d = kernels.bfs_limited(G._indptr, G._indices, s, k)
        close = np.flatnonzero(d > 0)
        close = close[close > s]
        if close.size:
            pairs.append(np.column_stack([np.full(close.size, s), close]))
    edges = np.concatenate(pairs) if pairs else np.empty((0, 2), dtype=np.int64)
    return Graph(G.n, edges, G.labels)


def blowup(G: Graph, k: int) -> Graph:
    """Strong product with a k-clique: vertex (v, i) gets id v*k + i."""
    if k < 1:
        raise GraphError("blow-up size must be >= 1")
    edges = []
    for v in range(G.n):
        for i in range(k):
            for j in range(i + 1, k):
                edges.append((v * k + i, v * k + j))
    for u, v in G.edges:
        for i in range(k):
            for j in range(k):
                edges.append((u * k + i, v * k + j))
    labels = {v * k + i: f"{_label(G, v)}|copy{i}" for v in range(G.n) for i in range(k)}
    return Graph(G.n * k, edges, labels)


def strong_product(G: Graph, H: Graph) -> Graph:
    """Strong product; vertex (u, x) gets id u*H.n + x."""
    nh = H.n
    edges = []
    for u in range(G.n):
        for x, y in H.edges:
            edges.append((u * nh + x, u * nh + y))
    for u, v in G.edges:
        for x in range(nh):
            edges.append((u * nh + x, v * nh + x))
        for x, y in H.edges:
            edges.append((u * nh + x, v * nh + y))
            edges.append((u * nh + y, v * nh + x))
    labels = {
        u * nh + x: f"({_label(G, u)},{_label(H, x)})" for u in range(G.n) for x in range(nh)
    }
    return Graph(G.n * nh, edges, labels)


def subdivide(G: Graph, m: int) -> Graph:
    """Replace every edge by a path with ``m`` internal vertices.

    Originals keep their ids; internal vertex ``j`` (0-based, counted from the
    smaller endpoint) of the e-th canonical edge gets id ``n + e*m + j``.
    Scales every distance between original vertices by exactly ``m + 1``.
    """
    if m < 0:
        raise GraphError("subdivision count must be >= 0")
    if m == 0:
        return Graph(G.n, G.edges, G.labels)
    edges = []
    labels = dict(G.labels)
    for e, (u, v) in enumerate(G.edges):
        chain = [u] + [G.n + e * m + j for j in range(m)] + [v]
        edges.extend(zip(chain[:-1], chain[1:]))
        for j in range(m):
            labels[G.n + e * m + j] = f"sub({u},{v})/{j}"
    return Graph(G.n + len(G.edges) * m, edges, labels)


def attach_pendants(G: Graph, k: int) -> Graph:
    """Attach ``k`` fresh degree-1 vertices to every vertex.

    Pendant ``j`` of vertex ``u`` gets id ``n + u*k + j``.
    """
    if k < 0:
        raise GraphError("pendant count must be >= 0")
    edges = list(G.edges)
    labels = dict(G.labels)
    for u in range(G.n):
        for j in range(k):
            p = G.n + u * k + j
            edges.append((u, p))
            labels[p] = f"pendant({u},{j})"
    return Graph(G.n + G.n * k, edges, labels)


def disjoint_union(graphs: Iterable[Graph]) -> Graph:
    """Disjoint union; labels record the component index."""
    graphs = list(graphs)
    offset = 0
    edges = []
    labels = {}
    for idx, G in enumerate(graphs):
        for u, v in G.edges:
            edges.append((u + offset, v + offset))
        for v in range(G.n):
            labels[v + offset] = f"c{idx}:{_label(G, v)}"
        offset += G.n
    return Graph(offset, edges, labels)


@dataclass(frozen=True)
class PendantEmbedding:
    """Injective homomorphism from ``blowup(power(base, k), k)`` into
    ``power(attach_pendants(base, k), k + 2)``.

    ``mapping[g]`` is the host vertex carrying guest vertex ``g``; copy ``i``
    of base vertex ``v`` rides on pendant ``i`` of ``v``.
    """

    host: Graph
    guest: Graph
    mapping: tuple[int, ...]
    exponent: int


def pendant_power_embedding(base: Graph, k: int) -> PendantEmbedding:
    """Realize the k-fold blow-up of the k-th power inside the (k+2)-nd power
    of the graph with k pendants attached; the adjacency check is exhaustive.
    """
    if k < 1:
        raise GraphError("pendant embedding needs k >= 1")
    guest = blowup(power(base, k), k)
    pend = attach_pendants(base, k)
    host = power(pend, k + 2)
    mapping = tuple(base.n + v * k + i for v in range(base.n) for i in range(k))
    if len(set(mapping)) != len(mapping):
        raise GraphError("pendant mapping is not injective")
    host_edges = host.edge_set
    for gu, gv in guest.edges:
        hu, hv = mapping[gu], mapping[gv]
        pair = (hu, hv) if hu < hv else (hv, hu)
        if pair not in host_edges:
            raise GraphError(f"guest edge {(gu, gv)} not carried by the host power")
    return PendantEmbedding(host=host, guest=guest, mapping=mapping, exponent=k + 2)


# ---------------------------------------------------------------------------
# Serialization

def graph_to_json(G: Graph) -> dict:
    return {
        "n": G.n,
        "edges": [list(e) for e in G.edges],
        "labels": {str(v): s for v, s in sorted(G.labels.items())},
    }


def graph_from_json(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        edges = [(int(u), int(v)) for u, v in obj["edges"]]
        labels = {int(v): str(s) for v, s in obj.get("labels", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph object: {exc}") from exc
    return Graph(n, edges, labels)


def dumps_canonical(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def graph_to_dot(G: Graph) -> str:
    lines = ["graph G {"]
    for v in range(G.n):
        if v in G.labels:
            lines.append(f'  {v} [label="{G.labels[v]}"];')
        else:
            lines.append(f"  {v};")
    for u, v in G.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
