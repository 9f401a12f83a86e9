"""Locally finite graph sources and finite windows cut out of them.

A source is a deterministic neighbor oracle over hashable keys plus a base
point.  ``ball`` explores it breadth-first and returns a finite window
relabeled to dense integers (discovery order), with the boundary sphere
marked.  The infinite object itself is never materialized.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

import numpy as np

from .graphs import Graph, GraphError
from .treedec import PLANAR, SMALL, TreeDecomposition

Key = Hashable


@dataclass(frozen=True)
class GraphSource:
    """Neighbor oracle: ``neighbors(key)`` finite and deterministic.

    ``add_apex`` marks families whose windows get one extra vertex joined to
    everything after the ball is cut (finite stand-in for a universal apex;
    the oracle itself must stay locally finite).
    """

    name: str
    base: Key
    neighbors: Callable[[Key], tuple[Key, ...]]
    add_apex: bool = False


@dataclass(frozen=True)
class Window:
    """Ball of ``radius`` around the source base point, densely relabeled."""

    graph: Graph
    source_name: str
    center: int
    radius: int
    boundary: tuple[int, ...]
    key_to_id: dict = field(repr=False, hash=False, compare=False, default=None)

    def to_json(self) -> dict:
        from .graphs import graph_to_json

        return {
            "source": self.source_name,
            "center": self.center,
            "radius": self.radius,
            "boundary": list(self.boundary),
            "graph": graph_to_json(self.graph),
        }


DEFAULT_VERTEX_CAP = 2_000_000


def ball(source: GraphSource, radius: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Window:
    """Explore the source to depth ``radius`` and cut out the ball."""
    if radius < 0:
        raise GraphError("radius must be non-negative")
    dist: dict[Key, int] = {source.base: 0}
    order: list[Key] = [source.base]
    queue = deque([source.base])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= radius:
            continue
        for v in source.neighbors(u):
            if v not in dist:
                if len(dist) >= vertex_cap:
                    raise GraphError(
                        f"window exceeds the vertex cap ({vertex_cap}); "
                        "raise it explicitly if intended"
                    )
                dist[v] = du + 1
                order.append(v)
                queue.append(v)
    ids = {key: i for i, key in enumerate(order)}
    edges = set()
    for key, u in ids.items():
        for nb in source.neighbors(key):
            v = ids.get(nb)
            if v is not None and u < v:
                edges.add((u, v))
    labels = {i: _format_key(key) for key, i in ids.items()}
    n = len(order)
    if source.add_apex:
        apex = n
        for v in range(n):
            edges.add((v, apex))
        labels[apex] = "apex"
        n += 1
    graph = Graph(n, sorted(edges), labels)
    boundary = tuple(i for i, key in enumerate(order) if dist[key] == radius)
    return Window(
        graph=graph,
        source_name=source.name,
        center=0,
        radius=radius,
        boundary=boundary,
        key_to_id=ids,
    )


def _format_key(key: Key) -> str:
    if isinstance(key, tuple):
        return "(" + ",".join(_format_key(k) for k in key) + ")"
    return str(key)


# ---------------------------------------------------------------------------
# Built-in families

def grid2() -> GraphSource:
    def nbrs(key):
        x, y = key
        return ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1))

    return GraphSource("grid2", (0, 0), nbrs)


def grid2_diag() -> GraphSource:
    def nbrs(key):
        x, y = key
        return tuple(
            (x + dx, y + dy)
            for dx in (-1, 0, 1)
            for dy in (-1, 0, 1)
            if (dx, dy) != (0, 0)
        )

    return GraphSource("grid2_diag", (0, 0), nbrs)


def grid3() -> GraphSource:
    def nbrs(key):
        x, y, z = key
        return (
            (x - 1, y, z), (x + 1, y, z),
            (x, y - 1, z), (x, y + 1, z),
            (x, y, z - 1), (x, y, z + 1),
        )

    return GraphSource("grid3", (0, 0, 0), nbrs)


def two_way_path() -> GraphSource:
    return GraphSource("two_way_path", 0, lambda k: (k - 1, k + 1))


def regular_tree(d: int) -> GraphSource:
    """Infinite tree in which every vertex has degree exactly d."""
    if d < 1:
        raise GraphError("degree must be >= 1")

    def nbrs(key):
        if key == ():
            return tuple((i,) for i in range(d))
        return (key[:-1],) + tuple(key + (i,) for i in range(d - 1))

    return GraphSource(f"regular_tree({d})", (), nbrs)


def binary_tree() -> GraphSource:
    """Rooted infinite binary tree: two children everywhere, so interior
    degree 3 and root degree 2."""

    def nbrs(key):
        if key == ():
            return ((0,), (1,))
        return (key[:-1], key + (0,), key + (1,))

    return GraphSource("binary_tree", (), nbrs)


def _strong_product_source(name: str, a: GraphSource, b: GraphSource) -> GraphSource:
    def nbrs(key):
        ka, kb = key
        out = []
        for na in (ka,) + tuple(a.neighbors(ka)):
            for nb in (kb,) + tuple(b.neighbors(kb)):
                if (na, nb) != key:
                    out.append((na, nb))
        return tuple(out)

    return GraphSource(name, (a.base, b.base), nbrs)


def tree_times_path() -> GraphSource:
    """Strong product of the binary tree with the two-way infinite path."""
    return _strong_product_source("tree_times_path", binary_tree(), two_way_path())


def claw_source(m: int) -> GraphSource:
    """Tree made of m infinite rays glued at one center vertex.

    Keys: () for the center, (j, d) for depth d >= 1 on ray j.  Balls of its
    product with a path grow polynomially, unlike binary-tree products.
    """
    if m < 1:
        raise GraphError("need at least one ray")

    def nbrs(key):
        if key == ():
            return tuple((j, 1) for j in range(m))
        j, d = key
        below = () if d == 1 else (j, d - 1)
        return (below, (j, d + 1))

    return GraphSource(f"claw({m})", (), nbrs)


def claw_times_path(m: int) -> GraphSource:
    """Strong product of the m-ray claw with the two-way infinite path."""
    return _strong_product_source(f"claw_times_path({m})", claw_source(m), two_way_path())


def grid2_apex() -> GraphSource:
    src = grid2()
    return GraphSource("grid2_apex", src.base, src.neighbors, add_apex=True)


def grid2_long_edge(length: int) -> GraphSource:
    """Planar grid plus one extra edge joining (0,0) to (length,0)."""
    if length < 2:
        raise GraphError("long edge needs length >= 2")
    base_nbrs = grid2().neighbors

    def nbrs(key):
        out = base_nbrs(key)
        if key == (0, 0):
            return out + ((length, 0),)
        if key == (length, 0):
            return out + ((0, 0),)
        return out

    return GraphSource(f"grid2_long_edge({length})", (0, 0), nbrs)


BUILTIN_SOURCES: dict[str, Callable[[], GraphSource]] = {
    "grid2": grid2,
    "grid3": grid3,
    "grid2_diag": grid2_diag,
    "grid2_apex": grid2_apex,
    "two_way_path": two_way_path,
    "binary_tree": binary_tree,
    "tree_times_path": tree_times_path,
}

_PARAMETRIZED: dict[str, Callable[[int], GraphSource]] = {
    "regular_tree": regular_tree,
    "grid2_long_edge": grid2_long_edge,
    "claw": claw_source,
    "claw_times_path": claw_times_path,
}


def resolve_source(name: str) -> GraphSource:
    """Look up a source by name; parametrized ones as e.g. ``regular_tree(3)``."""
    name = name.strip()
    if name in BUILTIN_SOURCES:
        return BUILTIN_SOURCES[name]()
    if name.endswith(")") and "(" in name:
        head, _, arg = name[:-1].partition("(")
        if head in _PARAMETRIZED:
            try:
                value = int(arg)
            except ValueError:
                raise GraphError(f"bad source parameter in {name!r}") from None
            return _PARAMETRIZED[head](value)
    known = sorted(BUILTIN_SOURCES) + [f"{k}(<int>)" for k in sorted(_PARAMETRIZED)]
    raise GraphError(f"unknown source {name!r}; known: {', '.join(known)}")


def square_grid(n: int) -> Graph:
    """The n-by-n grid graph; vertex (x, y) has id x*n + y."""
    if n < 1:
        raise GraphError("grid side must be >= 1")
    ids = np.arange(n * n).reshape(n, n)
    horiz = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
    vert = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
    labels = {int(x * n + y): f"({x},{y})" for x in range(n) for y in range(n)}
    return Graph(n * n, np.concatenate([horiz, vert]), labels)


def grid_coordinates(n: int) -> np.ndarray:
    """Coordinates aligned with ``square_grid``: row v is (x, y) of vertex v."""
    xs, ys = np.divmod(np.arange(n * n), n)
    return np.column_stack([xs, ys])


# ---------------------------------------------------------------------------
# Seeded generator: planar pieces glued along small cliques

def _delaunay_piece(rng: np.random.Generator, size: int) -> tuple[int, list[tuple[int, int]]]:
    """Connected planar piece: Delaunay triangulation of random points,
    sparsified while keeping a spanning tree."""
    if size == 1:
        return 1, []
    if size == 2:
        return 2, [(0, 1)]
    from scipy.spatial import Delaunay

    pts = rng.random((size, 2))
    tri = Delaunay(pts)
    edges = set()
    for simplex in tri.simplices:
        a, b, c = (int(x) for x in simplex)
        edges.add((min(a, b), max(a, b)))
        edges.add((min(a, c), max(a, c)))
        edges.add((min(b, c), max(b, c)))
    edges = sorted(edges)
    # Spanning tree via BFS over the triangulation, then drop a random
    # quarter of the leftover edges.
    adj: dict[int, list[int]] = {v: [] for v in range(size)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    tree_edges = set()
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in seen:
                seen.add(v)
                tree_edges.add((min(u, v), max(u, v)))
                queue.append(v)
    kept = [
        e for e in edges
        if e in tree_edges or rng.random() >= 0.25
    ]
    return size, kept


def _random_small_piece(rng: np.random.Generator, size: int) -> tuple[int, list[tuple[int, int]]]:
    """Connected piece on ``size`` vertices: random tree plus a few chords."""
    if size == 1:
        return 1, []
    edges = set()
    for v in range(1, size):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    extra = int(rng.integers(0, size))
    for _ in range(extra):
        u = int(rng.integers(0, size))
        v = int(rng.integers(0, size))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return size, sorted(edges)


def _clique_pool(size: int, edges: list[tuple[int, int]], a: int) -> list[tuple[int, ...]]:
    """All a-cliques of a piece for a <= 3 (vertices, edges, triangles)."""
    if a == 1:
        return [(v,) for v in range(size)]
    if a == 2:
        return [tuple(e) for e in edges]
    if a == 3:
        eset = set(edges)
        out = []
        for u, v in edges:
            for w in range(v + 1, size):
                if (u, w) in eset and (v, w) in eset:
                    out.append((u, v, w))
        return out
    raise GraphError("clique size above 3 would break torso planarity")


def tree_sum_planar(
    seed: int,
    pieces: int,
    piece_size: int,
    small_fraction: float,
    max_adhesion: int,
) -> tuple[Graph, TreeDecomposition]:
    """Seeded tree-sum of random planar pieces and random small pieces.

    Pieces are glued along cliques of size <= min(max_adhesion, 3) chosen on
    both sides, which keeps every torso equal to its piece and therefore
    keeps planar-type torsos planar.  The decomposition tree mirrors the
    attachment order.
    """
    if pieces < 1 or piece_size < 1 or max_adhesion < 1:
        raise GraphError("pieces, piece_size, max_adhesion must be >= 1")
    if not 0.0 <= small_fraction <= 1.0:
        raise GraphError("small_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    global_edges: set[tuple[int, int]] = set()
    bags: dict[int, list[int]] = {}
    types: dict[int, str] = {}
    tree_edges: list[tuple[int, int]] = []
    piece_local: list[tuple[int, list[tuple[int, int]], dict[int, int]]] = []
    n_global = 0

    for idx in range(pieces):
        # Piece 0 is always a planar anchor; later pieces flip a coin.
        small = idx > 0 and rng.random() < small_fraction
        if small:
            size = int(rng.integers(2, max(3, min(piece_size, 6)) + 1))
            size, local_edges = _random_small_piece(rng, size)
            types[idx] = SMALL
        else:
            size, local_edges = _delaunay_piece(rng, piece_size)
            types[idx] = PLANAR

        to_global: dict[int, int] = {}
        if idx > 0:
            parent = int(rng.integers(0, idx))
            p_size, p_edges, p_map = piece_local[parent]
            a_cap = min(max_adhesion, 3, size, p_size)
            a = int(rng.integers(1, a_cap + 1))
            parent_pool = child_pool = None
            while a >= 1:
                parent_pool = _clique_pool(p_size, p_edges, a)
                child_pool = _clique_pool(size, local_edges, a)
                if parent_pool and child_pool:
                    break
                a -= 1
            p_clique = parent_pool[int(rng.integers(0, len(parent_pool)))]
            c_clique = child_pool[int(rng.integers(0, len(child_pool)))]
            for cv, pv in zip(c_clique, p_clique):
                to_global[cv] = p_map[pv]
            tree_edges.append((parent, idx))
        for v in range(size):
            if v not in to_global:
                to_global[v] = n_global
                n_global += 1
        for u, v in local_edges:
            gu, gv = to_global[u], to_global[v]
            global_edges.add((min(gu, gv), max(gu, gv)))
        bags[idx] = sorted(to_global[v] for v in range(size))
        piece_local.append((size, local_edges, to_global))

    graph = Graph(n_global, sorted(global_edges))
    td = TreeDecomposition(bags, tree_edges, types)
    return graph, td
