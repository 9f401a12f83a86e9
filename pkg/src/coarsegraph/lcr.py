"""Bounded local crossings: combinatorial drawings, crossing-replacement
planarization, path realizations inside graph powers, and the per-edge
crossing budget 2k(k+1)*Delta^k they certify.

Drawings here carry no coordinates.  A drawing is a rotation system plus,
per edge, the ordered list of crossings along it; replacing every crossing
by a degree-4 vertex recovers a candidate planar graph, and planarity of
that graph is the realizability test.  The seeded generator draws straight
segments on an integer grid with exact orientation arithmetic, so the
drawings it emits are geometric facts, not hopes.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graphs import (
    Graph,
    GraphError,
    bfs_distances,
    graph_from_json,
    graph_to_json,
    is_connected,
)
from .planarity import PlanarityResult, planarity_check, verify_rotation_system
from .qi import _lex_min_shortest_path


# ---------------------------------------------------------------------------
# Drawings

@dataclass(frozen=True)
class Crossing:
    """One crossing: the two edge ids involved and, for each, the index of
    this crossing in that edge's own crossing order."""

    ident: int
    edges: tuple[int, int]
    pos: tuple[int, int]

    def __post_init__(self):
        e1, e2 = (int(x) for x in self.edges)
        p1, p2 = (int(x) for x in self.pos)
        if e1 > e2:
            e1, e2, p1, p2 = e2, e1, p2, p1
        object.__setattr__(self, "edges", (e1, e2))
        object.__setattr__(self, "pos", (p1, p2))


@dataclass(frozen=True)
class Drawing:
    """Combinatorial drawing: per-vertex rotation over incident edge ids,
    plus the crossing records."""

    rotations: dict[int, tuple[int, ...]]
    crossings: tuple[Crossing, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "rotations",
            {int(v): tuple(int(e) for e in r) for v, r in self.rotations.items()},
        )
        object.__setattr__(
            self, "crossings", tuple(sorted(self.crossings, key=lambda c: c.ident))
        )

    def crossing_lists(self, num_edges: int) -> list[list[Crossing]]:
        """Crossings of each edge, ordered along the edge."""
        out: list[list[Crossing]] = [[] for _ in range(num_edges)]
        for c in self.crossings:
            out[c.edges[0]].append(c)
            out[c.edges[1]].append(c)
        for e, lst in enumerate(out):
            lst.sort(key=lambda c: c.pos[c.edges.index(e)])
        return out

    def to_json(self) -> dict:
        return {
            "rotations": {str(v): list(r) for v, r in sorted(self.rotations.items())},
            "crossings": [
                {"id": c.ident, "edges": list(c.edges), "pos": list(c.pos)}
                for c in self.crossings
            ],
        }


def drawing_from_json(obj: dict) -> Drawing:
    return Drawing(
        rotations={int(v): tuple(r) for v, r in obj["rotations"].items()},
        crossings=tuple(
            Crossing(int(c["id"]), tuple(c["edges"]), tuple(c["pos"]))
            for c in obj["crossings"]
        ),
    )


def validate_drawing(G: Graph, d: Drawing) -> None:
    """Raise GraphError unless ``d`` is a well-formed drawing of ``G``."""
    m = G.num_edges
    incident: dict[int, list[int]] = {v: [] for v in range(G.n)}
    for e, (u, v) in enumerate(G.edges):
        incident[u].append(e)
        incident[v].append(e)
    if set(d.rotations) != set(range(G.n)):
        raise GraphError("rotation system must cover every vertex exactly once")
    for v in range(G.n):
        if sorted(d.rotations[v]) != sorted(incident[v]):
            raise GraphError(f"rotation at vertex {v} does not list its incident edges")
    seen_ids = set()
    for c in d.crossings:
        if c.ident in seen_ids:
            raise GraphError(f"crossing id {c.ident} appears twice")
        seen_ids.add(c.ident)
        e1, e2 = c.edges
        if not (0 <= e1 < m and 0 <= e2 < m):
            raise GraphError(f"crossing {c.ident} names an unknown edge")
        if e1 == e2:
            raise GraphError(f"crossing {c.ident} has an edge crossing itself")
    for e, lst in enumerate(d.crossing_lists(m)):
        got = sorted(c.pos[c.edges.index(e)] for c in lst)
        if got != list(range(len(lst))):
            raise GraphError(f"edge {e} has inconsistent crossing positions {got}")


# ---------------------------------------------------------------------------
# Crossing replacement

@dataclass(frozen=True)
class PlanarizedDrawing:
    """Outcome of replacing every crossing by a degree-4 vertex.

    ``graph`` keeps the original vertex ids and appends one vertex per
    crossing; ``edge_paths[e]`` is the path now carrying edge ``e``, so the
    original endpoints sit at distance <= ``power_exponent`` (= max
    crossings per edge + 1).  ``planarity`` reports whether the replaced
    graph is planar; a non-planar outcome is a diagnostic that the input
    drawing was not realizable.
    """

    graph: Graph
    edge_paths: dict[int, tuple[int, ...]]
    crossing_vertex: dict[int, int]
    max_crossings: int
    power_exponent: int
    planarity: PlanarityResult

    @property
    def planar(self) -> bool:
        return self.planarity.is_planar

    def to_json(self) -> dict:
        out = {
            "graph": graph_to_json(self.graph),
            "edge_paths": {str(e): list(p) for e, p in sorted(self.edge_paths.items())},
            "crossing_vertices": {
                str(i): v for i, v in sorted(self.crossing_vertex.items())
            },
            "max_crossings": self.max_crossings,
            "power_exponent": self.power_exponent,
            "planar": self.planar,
        }
        if not self.planar:
            out["diagnostic"] = (
                f"replaced graph contains a {self.planarity.witness_kind} subdivision; "
                "the drawing is not realizable"
            )
        return out


def planarize_drawing(G: Graph, d: Drawing) -> PlanarizedDrawing:
    """Replace each crossing by a new degree-4 vertex and certify the result.

    Exact bookkeeping: the new graph has |V| + (#crossings) vertices and
    |E| + 2*(#crossings) edges, and every original edge with c crossings
    becomes a path of c+1 edges.  Each original endpoint pair is re-checked
    by BFS to sit within max_crossings + 1 of its partner.
    """
    validate_drawing(G, d)
    order = sorted(c.ident for c in d.crossings)
    crossing_vertex = {ident: G.n + i for i, ident in enumerate(order)}
    labels = dict(G.labels)
    for ident, x in crossing_vertex.items():
        labels[x] = f"cross{ident}"

    lists = d.crossing_lists(G.num_edges)
    edge_paths: dict[int, tuple[int, ...]] = {}
    new_edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for e, (u, v) in enumerate(G.edges):
        path = [u] + [crossing_vertex[c.ident] for c in lists[e]] + [v]
        edge_paths[e] = tuple(path)
        for a, b in zip(path, path[1:]):
            key = (a, b) if a < b else (b, a)
            if key in seen:
                raise GraphError(
                    f"crossing layout produces a duplicate segment {key}; "
                    "the drawing is not realizable"
                )
            seen.add(key)
            new_edges.append(key)

    F2 = Graph(G.n + len(order), new_edges, labels)
    if F2.num_edges != G.num_edges + 2 * len(order):
        raise GraphError("crossing replacement broke the edge count")

    s = max((len(lst) for lst in lists), default=0)
    for e, (u, v) in enumerate(G.edges):
        dist = kernels.bfs_limited(F2._indptr, F2._indices, u, s + 1)
        if dist[v] < 0:
            raise GraphError(f"edge {e} endpoints drifted beyond distance {s + 1}")

    return PlanarizedDrawing(
        graph=F2,
        edge_paths=edge_paths,
        crossing_vertex=crossing_vertex,
        max_crossings=s,
        power_exponent=s + 1,
        planarity=planarity_check(F2),
    )


@dataclass(frozen=True)
class DrawingRestriction:
    """Induced sub-drawing: ``kept_vertices[new]`` is the original vertex id
    and ``edge_map`` sends surviving original edge ids to the new ones."""

    graph: Graph
    drawing: Drawing
    kept_vertices: tuple[int, ...]
    edge_map: dict[int, int]


def restrict_drawing(G: Graph, d: Drawing, keep) -> DrawingRestriction:
    """Drawing induced on a vertex subset; crossings of deleted edges vanish
    and per-edge crossing counts never increase."""
    validate_drawing(G, d)
    kept = sorted(set(int(v) for v in keep))
    if kept and not (0 <= kept[0] and kept[-1] < G.n):
        raise GraphError("restriction set out of range")
    new_id = {old: new for new, old in enumerate(kept)}

    surviving: list[tuple[int, tuple[int, int]]] = []
    for e, (u, v) in enumerate(G.edges):
        if u in new_id and v in new_id:
            surviving.append((e, (new_id[u], new_id[v])))
    sub = Graph(
        len(kept),
        [pair for _, pair in surviving],
        {new_id[v]: G.labels[v] for v in kept if v in G.labels},
    )
    pair_to_new = {pair: i for i, pair in enumerate(sub.edges)}
    edge_map = {
        e: pair_to_new[(min(pair), max(pair))] for e, pair in surviving
    }

    old_lists = d.crossing_lists(G.num_edges)
    new_pos: dict[tuple[int, int], int] = {}
    kept_ids = set(edge_map)
    for e in sorted(kept_ids):
        rank = 0
        for c in old_lists[e]:
            other = c.edges[0] if c.edges[1] == e else c.edges[1]
            if other in kept_ids:
                new_pos[(c.ident, e)] = rank
                rank += 1
        if rank > len(old_lists[e]):
            raise GraphError("restriction increased a crossing count")

    crossings = []
    for c in d.crossings:
        e1, e2 = c.edges
        if e1 in kept_ids and e2 in kept_ids:
            crossings.append(
                Crossing(
                    c.ident,
                    (edge_map[e1], edge_map[e2]),
                    (new_pos[(c.ident, e1)], new_pos[(c.ident, e2)]),
                )
            )

    rotations = {
        new_id[v]: tuple(edge_map[e] for e in d.rotations[v] if e in kept_ids)
        for v in kept
    }
    out = DrawingRestriction(
        graph=sub,
        drawing=Drawing(rotations, tuple(crossings)),
        kept_vertices=tuple(kept),
        edge_map=edge_map,
    )
    validate_drawing(out.graph, out.drawing)
    return out


# ---------------------------------------------------------------------------
# Seeded straight-line generator (exact integer arithmetic)

_COORD_RANGE = 1_000_000


def _orient(p, q, r) -> int:
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


def _between(p, q, r) -> bool:
    """r strictly inside the segment pq, assuming collinearity."""
    return (
        min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
        and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
        and r != p
        and r != q
    )


def _segment_relation(p, q, r, s) -> str:
    """"disjoint", "crossing" (proper interior crossing), or "degenerate"
    (shared endpoint with collinear overlap, touching, or collinear)."""
    shared = {p, q} & {r, s}
    if shared:
        if len(shared) == 2:
            return "degenerate"  # same segment offered twice
        a = next(iter(shared))
        b = q if a == p else p
        c = s if a == r else r
        if _orient(a, b, c) == 0 and (
            (b[0] - a[0]) * (c[0] - a[0]) + (b[1] - a[1]) * (c[1] - a[1]) > 0
        ):
            return "degenerate"  # overlapping collinear segments
        return "disjoint"
    o1, o2 = _orient(p, q, r), _orient(p, q, s)
    o3, o4 = _orient(r, s, p), _orient(r, s, q)
    if o1 == 0 or o2 == 0 or o3 == 0 or o4 == 0:
        touching = (
            (o1 == 0 and _between(p, q, r))
            or (o2 == 0 and _between(p, q, s))
            or (o3 == 0 and _between(r, s, p))
            or (o4 == 0 and _between(r, s, q))
        )
        return "degenerate" if touching else "disjoint"
    return "crossing" if (o1 != o2 and o3 != o4) else "disjoint"


def _rotation_order(origin, others):
    """Indices of ``others`` sorted counterclockwise around ``origin``."""

    def half(pt) -> int:
        dx, dy = pt[0] - origin[0], pt[1] - origin[1]
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def cmp(i, j) -> int:
        a, b = others[i], others[j]
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        o = _orient(origin, a, b)
        return -o

    return sorted(range(len(others)), key=functools.cmp_to_key(cmp))


def random_one_planar_drawing(n: int, seed: int = 0) -> tuple[Graph, Drawing]:
    """Seeded connected graph plus a drawing with at most one crossing per
    edge, produced by greedy straight-line insertion on an integer grid.

    Every crossing in the output is a genuine proper segment crossing, so
    replacing crossings by vertices always yields a planar graph.
    """
    if n < 2:
        raise GraphError("need at least two vertices to draw")
    for attempt in range(64):
        rng = np.random.default_rng([int(seed), attempt, n])
        pts = [
            (int(x), int(y))
            for x, y in rng.integers(0, _COORD_RANGE, size=(n, 2))
        ]
        if len(set(pts)) != n:
            continue
        built = _greedy_one_planar(pts, rng)
        if built is None:
            continue
        G, drawing = built
        if is_connected(G):
            validate_drawing(G, drawing)
            return G, drawing
    raise GraphError("failed to draw a connected graph; try another seed")


def _greedy_one_planar(pts, rng):
    n = len(pts)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    accepted: list[tuple[int, int]] = []
    cross_count: dict[int, int] = {}
    cross_pairs: list[tuple[int, int]] = []  # indices into accepted

    for i, j in pairs:
        p, q = pts[i], pts[j]
        if any(
            _orient(p, q, pts[w]) == 0 and _between(p, q, pts[w])
            for w in range(n)
            if w not in (i, j)
        ):
            continue
        hits = []
        ok = True
        for idx, (a, b) in enumerate(accepted):
            rel = _segment_relation(p, q, pts[a], pts[b])
            if rel == "degenerate":
                ok = False
                break
            if rel == "crossing":
                hits.append(idx)
        if not ok or len(hits) > 1:
            continue
        if hits and cross_count.get(hits[0], 0) >= 1:
            continue
        mine = len(accepted)
        accepted.append((i, j))
        for idx in hits:
            cross_count[idx] = cross_count.get(idx, 0) + 1
            cross_count[mine] = 1
            cross_pairs.append((idx, mine))

    if not accepted:
        return None
    G = Graph(n, accepted)
    edge_id = {e: k for k, e in enumerate(G.edges)}
    ids = [edge_id[(min(a, b), max(a, b))] for a, b in accepted]

    rotations = {}
    for v in range(n):
        incident = [e for e, (a, b) in enumerate(G.edges) if v in (a, b)]
        tips = [pts[b if a == v else a] for a, b in (G.edges[e] for e in incident)]
        order = _rotation_order(pts[v], tips)
        rotations[v] = tuple(incident[t] for t in order)

    crossed = sorted(
        (min(ids[x], ids[y]), max(ids[x], ids[y])) for x, y in cross_pairs
    )
    crossings = tuple(
        Crossing(c, pair, (0, 0)) for c, pair in enumerate(crossed)
    )
    return G, Drawing(rotations, crossings)


# ---------------------------------------------------------------------------
# Realizing guest edges as host paths

@dataclass(frozen=True)
class PowerRealization:
    """Guest graph carried inside the ``exponent``-th power of a planar host:
    one canonical host path of length <= exponent per guest edge."""

    host: Graph
    guest: Graph
    injection: tuple[int, ...]
    paths: dict[tuple[int, int], tuple[int, ...]]
    exponent: int
    rotation_system: dict[int, tuple[int, ...]]

    @property
    def host_max_degree(self) -> int:
        return self.host.max_degree()

    def to_json(self) -> dict:
        return {
            "host": graph_to_json(self.host),
            "guest": graph_to_json(self.guest),
            "injection": list(self.injection),
            "k": self.exponent,
            "paths": {f"{u}-{v}": list(p) for (u, v), p in sorted(self.paths.items())},
        }


def realize_in_power(
    H: Graph,
    G: Graph,
    k: int,
    injection,
    rotation_system: dict[int, tuple[int, ...]] | None = None,
) -> PowerRealization:
    """Carry each guest edge on the canonical shortest host path.

    The host must be planar: a supplied rotation system is verified, an
    omitted one is computed.  Guest edges whose endpoint images sit farther
    than ``k`` apart are an error with the offending edge as witness.
    """
    if k < 1:
        raise GraphError("power exponent must be >= 1")
    inj = tuple(int(x) for x in injection)
    if len(inj) != G.n:
        raise GraphError("injection must place every guest vertex")
    if any(not 0 <= x < H.n for x in inj):
        raise GraphError("injection leaves the host")
    if len(set(inj)) != len(inj):
        raise GraphError("injection is not injective")

    if rotation_system is None:
        result = planarity_check(H)
        if not result.is_planar:
            raise GraphError(
                f"host is not planar (contains a {result.witness_kind} subdivision)"
            )
        rotation_system = result.rotation_system
    elif not verify_rotation_system(H, rotation_system):
        raise GraphError("supplied rotation system is not a planar embedding")

    dist_cache: dict[int, np.ndarray] = {}
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for u, v in G.edges:
        hu, hv = inj[u], inj[v]
        lo, hi = (hu, hv) if hu < hv else (hv, hu)
        if lo not in dist_cache:
            dist_cache[lo] = bfs_distances(H, lo)
        d = dist_cache[lo][hi]
        if not d <= k:
            raise GraphError(
                f"guest edge {(u, v)} maps to host pair {(hu, hv)} at distance {d} > {k}"
            )
        walk = _lex_min_shortest_path(H, dist_cache[lo], hi, lo)
        paths[(u, v)] = tuple(reversed(walk))

    return PowerRealization(
        host=H,
        guest=G,
        injection=inj,
        paths=paths,
        exponent=k,
        rotation_system=rotation_system,
    )


def crossing_formula(k: int, delta: int) -> int:
    """Per-edge crossing budget guaranteed by the tube construction."""
    return 2 * k * (k + 1) * delta**k


@dataclass(frozen=True)
class CrossingBound:
    """Measured tube-count crossing bounds for one realization.

    ``per_edge`` charges two crossings for every other path through every
    vertex of the edge's own path; this intentionally never undercounts the
    tube construction, and ``measured_max <= formula_value`` always holds.
    """

    per_edge: dict[tuple[int, int], int]
    measured_max: int
    formula_value: int
    exponent: int
    host_max_degree: int

    def to_json(self) -> dict:
        return {
            "per_edge": {f"{u}-{v}": b for (u, v), b in sorted(self.per_edge.items())},
            "measured_max": self.measured_max,
            "formula": self.formula_value,
            "k": self.exponent,
            "delta": self.host_max_degree,
        }


def one_planar_pipeline(n: int = 10, seed: int = 0, rate: int = 2) -> dict:
    """End-to-end chain: a graph quasi-isometric to a graph drawn with at
    most one crossing per edge gets carried, with every link certified,
    into a bounded power of a planar graph with a closed-form crossing
    budget.

    Stages: draw a host; plant a guest inside its ``rate``-th power; prune
    the host to bounded degree; restrict the drawing and replace crossings
    by vertices; re-embed the guest in a blown-up power of the now planar
    graph; trade blow-up copies for pendant vertices; realize guest edges
    as canonical paths and measure the crossing budget.  Returns a JSON
    ready summary; raises GraphError the moment any certificate fails.
    """
    from .graphs import attach_pendants, pendant_power_embedding, power
    from .qi import QIMap, embed_power_blowup, prune_to_bounded_degree

    host, drawing = random_one_planar_drawing(n, seed)
    rng = np.random.default_rng([int(seed), 1])
    extra = [
        e
        for e in power(host, rate).edges
        if e not in host.edge_set and rng.random() < 0.4
    ]
    guest = Graph(host.n, list(host.edges) + extra)

    identity = QIMap(guest, host, tuple(range(host.n)))
    pruned = prune_to_bounded_degree(identity, rate)
    if not pruned.report.ok:
        raise GraphError(f"pruning failed: {pruned.report.failed()}")

    res = restrict_drawing(host, drawing, pruned.kept)
    if res.graph != pruned.subgraph:
        raise GraphError("drawing restriction disagrees with the pruned host")
    pl = planarize_drawing(res.graph, res.drawing)
    if not pl.planar:
        raise GraphError("replaced drawing is not planar")

    emb = None
    for cand in range(1, 65):
        try:
            emb = embed_power_blowup(pruned.restricted, cand)
            break
        except GraphError:
            continue
    if emb is None or not emb.report.ok:
        raise GraphError("no integer rate certifies the pruned map")

    # Power edges of the pruned host survive in the replaced graph with the
    # exponent scaled by the per-edge path length bound.
    stretch = emb.rate * 2 * pl.power_exponent
    width = max(stretch, emb.fiber_cap)
    pendant = pendant_power_embedding(pl.graph, width)
    injection = []
    for x in range(guest.n):
        packed = emb.assignment[x]
        y, copy = packed // emb.fiber_cap, packed % emb.fiber_cap
        injection.append(pendant.mapping[y * width + copy])

    real = realize_in_power(
        attach_pendants(pl.graph, width), guest, width + 2, injection
    )
    bound = crossing_upper_bound(real)
    return {
        "hosts": {"drawn": host.n, "pruned": pruned.subgraph.n, "planar": pl.graph.n},
        "guest": {"n": guest.n, "m": guest.num_edges},
        "prune": pruned.report.to_json(),
        "planarize": {
            "crossings": len(drawing.crossings),
            "kept_crossings": len(res.drawing.crossings),
            "power_exponent": pl.power_exponent,
            "planar": pl.planar,
        },
        "embed": emb.to_json(),
        "pendant_exponent": pendant.exponent,
        "realization": {"k": real.exponent, "delta": real.host_max_degree},
        "crossing_bound": bound.to_json(),
    }


def crossing_upper_bound(real: PowerRealization) -> CrossingBound:
    """Count, per guest edge, twice the number of (path, shared vertex)
    incidences with other paths, and compare with the closed-form budget."""
    loads = np.zeros(real.host.n, dtype=np.int64)
    for p in real.paths.values():
        loads[list(p)] += 1
    per_edge = {}
    for e, p in real.paths.items():
        per_edge[e] = 2 * int((loads[list(p)] - 1).sum())
    measured = max(per_edge.values(), default=0)
    formula = crossing_formula(real.exponent, real.host.max_degree())
    if measured > formula:
        worst = max(per_edge, key=per_edge.get)
        raise GraphError(
            f"tube count {measured} on edge {worst} exceeds the budget {formula}"
        )
    return CrossingBound(
        per_edge=per_edge,
        measured_max=measured,
        formula_value=formula,
        exponent=real.exponent,
        host_max_degree=real.host.max_degree(),
    )
