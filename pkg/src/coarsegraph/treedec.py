"""Tree-decompositions: validation, torsos, separations, tightness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graphs import Graph, connected_components
from .planarity import planarity_check

PLANAR = "planar"
SMALL = "small"


class DecompositionError(ValueError):
    pass


class TreeDecomposition:
    """Bags indexed by node id, plus the tree structure over the nodes.

    Every bag carries a type flag: small-type bags stand in for the finite
    bags of the construction (they get spanning-tree copies), planar-type
    bags must have planar torsos.
    """

    __slots__ = ("bags", "types", "tree_edges")

    def __init__(
        self,
        bags: Mapping[int, Iterable[int]],
        tree_edges: Iterable[tuple[int, int]],
        types: Mapping[int, str] | None = None,
    ):
        self.bags: dict[int, frozenset[int]] = {
            int(t): frozenset(int(v) for v in bag) for t, bag in bags.items()
        }
        edges = []
        for s, t in tree_edges:
            s, t = int(s), int(t)
            if s == t:
                raise DecompositionError("tree loop")
            edges.append((min(s, t), max(s, t)))
        self.tree_edges: tuple[tuple[int, int], ...] = tuple(sorted(set(edges)))
        if len(self.tree_edges) != len(edges):
            raise DecompositionError("duplicate tree edge")
        types = types or {}
        self.types: dict[int, str] = {}
        for t in self.bags:
            ty = types.get(t, SMALL)
            if ty not in (PLANAR, SMALL):
                raise DecompositionError(f"unknown bag type {ty!r}")
            self.types[t] = ty
        for s, t in self.tree_edges:
            if s not in self.bags or t not in self.bags:
                raise DecompositionError("tree edge references unknown node")

    @property
    def node_ids(self) -> list[int]:
        return sorted(self.bags)

    def tree_neighbors(self, t: int) -> list[int]:
        out = []
        for a, b in self.tree_edges:
            if a == t:
                out.append(b)
            elif b == t:
                out.append(a)
        return sorted(out)

    def tree_graph(self) -> tuple[Graph, dict[int, int]]:
        """The tree as a Graph over dense ranks; returns (graph, id -> rank)."""
        ids = self.node_ids
        rank = {t: i for i, t in enumerate(ids)}
        edges = [(rank[s], rank[t]) for s, t in self.tree_edges]
        return Graph(len(ids), edges, {i: str(t) for t, i in rank.items()}), rank

    def __repr__(self) -> str:
        return f"TreeDecomposition(nodes={len(self.bags)}, tree_edges={len(self.tree_edges)})"


@dataclass(frozen=True)
class Separation:
    """Vertex partition (left, separator, right) with no left-right edge."""

    left: frozenset[int]
    separator: frozenset[int]
    right: frozenset[int]


@dataclass
class Clause:
    name: str
    ok: bool
    witness: str | None = None


@dataclass
class ValidationReport:
    clauses: list[Clause] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses)

    def failed(self) -> list[str]:
        return [c.name for c in self.clauses if not c.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "clauses": [
                {"name": c.name, "ok": c.ok, "witness": c.witness} for c in self.clauses
            ],
        }


def _tree_is_connected_acyclic(td: TreeDecomposition) -> bool:
    ids = td.node_ids
    if len(td.tree_edges) != len(ids) - 1:
        return False
    tree, rank = td.tree_graph()
    return len(connected_components(tree)) == 1


def validate(G: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check the three decomposition axioms, tree shape, and planar torsos."""
    rep = ValidationReport()
    ids = td.node_ids
    ok_struct = bool(ids) and _tree_is_connected_acyclic(td)
    in_range = all(0 <= v < G.n for bag in td.bags.values() for v in bag)
    rep.clauses.append(
        Clause("tree_structure", ok_struct and in_range,
               None if ok_struct and in_range else "nodes do not form a tree or bag out of range")
    )
    if not (ok_struct and in_range):
        return rep

    union = set().union(*td.bags.values()) if td.bags else set()
    missing = sorted(set(range(G.n)) - union)
    rep.clauses.append(
        Clause("vertices_covered", not missing,
               None if not missing else f"vertex {missing[0]} in no bag")
    )

    bad_edge = None
    for u, v in G.edges:
        if not any(u in bag and v in bag for bag in td.bags.values()):
            bad_edge = (u, v)
            break
    rep.clauses.append(
        Clause("edges_covered", bad_edge is None,
               None if bad_edge is None else f"edge {bad_edge} in no bag")
    )

    tree, rank = td.tree_graph()
    holders: dict[int, list[int]] = {v: [] for v in range(G.n)}
    for t, bag in td.bags.items():
        for v in bag:
            holders[v].append(rank[t])
    bad_vertex = None
    for v in range(G.n):
        nodes = holders[v]
        if len(nodes) <= 1:
            continue
        sub = set(nodes)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            x = stack.pop()
            for y in tree.neighbors(x):
                if y in sub and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != sub:
            bad_vertex = v
            break
    rep.clauses.append(
        Clause("traces_connected", bad_vertex is None,
               None if bad_vertex is None else f"bags holding vertex {bad_vertex} are disconnected in the tree")
    )

    bad_torso = None
    for t in ids:
        if td.types[t] == PLANAR:
            if not planarity_check(torso(G, td, t)).is_planar:
                bad_torso = t
                break
    rep.clauses.append(
        Clause("planar_torsos", bad_torso is None,
               None if bad_torso is None else f"planar-type node {bad_torso} has a non-planar torso")
    )
    return rep


def adhesion_sets(td: TreeDecomposition) -> dict[tuple[int, int], frozenset[int]]:
    return {
        (s, t): td.bags[s] & td.bags[t] for s, t in td.tree_edges
    }


def adhesion(td: TreeDecomposition) -> int:
    sets = adhesion_sets(td)
    return max((len(a) for a in sets.values()), default=0)


def width(td: TreeDecomposition) -> int:
    return max(len(bag) for bag in td.bags.values()) - 1


def torso_with_map(G: Graph, td: TreeDecomposition, t: int) -> tuple[Graph, tuple[int, ...]]:
    """Torso of node t relabeled densely; second item maps dense -> original."""
    if t not in td.bags:
        raise DecompositionError(f"unknown node {t}")
    bag = sorted(td.bags[t])
    rank = {v: i for i, v in enumerate(bag)}
    bag_set = td.bags[t]
    edges = set()
    for u in bag:
        for v in G.neighbors(u):
            if v in bag_set and u < v:
                edges.add((rank[u], rank[int(v)]))
    for s in td.tree_neighbors(t):
        ad = sorted(bag_set & td.bags[s])
        for i, u in enumerate(ad):
            for v in ad[i + 1 :]:
                edges.add((rank[u], rank[v]))
    labels = {rank[v]: G.labels.get(v, str(v)) for v in bag}
    return Graph(len(bag), sorted(edges), labels), tuple(bag)


def torso(G: Graph, td: TreeDecomposition, t: int) -> Graph:
    return torso_with_map(G, td, t)[0]


def edge_separation(G: Graph, td: TreeDecomposition, tree_edge: tuple[int, int]) -> Separation:
    """The separation induced by removing one edge of the decomposition tree."""
    s, t = tree_edge
    key = (min(s, t), max(s, t))
    if key not in td.tree_edges:
        raise DecompositionError(f"{tree_edge} is not a tree edge")
    # Nodes on the s-side after deleting the edge.
    side = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y in td.tree_neighbors(x):
            if (min(x, y), max(x, y)) == key:
                continue
            if y not in side:
                side.add(y)
                stack.append(y)
    sep = td.bags[s] & td.bags[t]
    left = frozenset().union(*(td.bags[x] for x in side)) - sep
    right = frozenset(range(G.n)) - left - sep
    for u, v in G.edges:
        if (u in left and v in right) or (u in right and v in left):
            raise DecompositionError(
                f"edge {(u, v)} crosses the separation of tree edge {key}; decomposition invalid"
            )
    return Separation(left=left, separator=sep, right=right)


@dataclass(frozen=True)
class TightnessReport:
    tight: bool
    left_component: tuple[int, ...] | None
    right_component: tuple[int, ...] | None
    failing_side: str | None

    def to_json(self) -> dict:
        return {
            "tight": self.tight,
            "left_component": list(self.left_component) if self.left_component else None,
            "right_component": list(self.right_component) if self.right_component else None,
            "failing_side": self.failing_side,
        }


def _full_neighborhood_component(G: Graph, side: frozenset[int], sep: frozenset[int]) -> tuple[int, ...] | None:
    """A connected component of G[side] whose G-neighborhood is exactly sep."""
    side_sorted = sorted(side)
    seen: set[int] = set()
    for s in side_sorted:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in G.neighbors(x):
                y = int(y)
                if y in side and y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        nbhd = set()
        for x in comp:
            for y in G.neighbors(x):
                y = int(y)
                if y not in comp:
                    nbhd.add(y)
        if nbhd == set(sep):
            return tuple(sorted(comp))
    return None


def is_tight(G: Graph, sep: Separation) -> TightnessReport:
    """A separation is tight when each side has a component seeing all of the
    separator; the report says which side fails otherwise."""
    left_comp = _full_neighborhood_component(G, sep.left, sep.separator)
    right_comp = _full_neighborhood_component(G, sep.right, sep.separator)
    failing = None
    if left_comp is None and right_comp is None:
        failing = "both"
    elif left_comp is None:
        failing = "left"
    elif right_comp is None:
        failing = "right"
    return TightnessReport(
        tight=failing is None,
        left_component=left_comp,
        right_component=right_comp,
        failing_side=failing,
    )


# ---------------------------------------------------------------------------
# Serialization

def decomposition_to_json(td: TreeDecomposition) -> dict:
    return {
        "nodes": [
            {"id": t, "bag": sorted(td.bags[t]), "type": td.types[t]}
            for t in td.node_ids
        ],
        "tree_edges": [list(e) for e in td.tree_edges],
    }


def decomposition_from_json(obj: dict, small_threshold: int | None = None) -> TreeDecomposition:
    """Parse a decomposition; bags without a type flag default by size
    against ``small_threshold`` (small iff |bag| <= threshold)."""
    try:
        bags = {}
        types = {}
        for node in obj["nodes"]:
            t = int(node["id"])
            bags[t] = [int(v) for v in node["bag"]]
            if "type" in node and node["type"] is not None:
                types[t] = node["type"]
            else:
                thr = 6 if small_threshold is None else small_threshold
                types[t] = SMALL if len(bags[t]) <= thr else PLANAR
        tree_edges = [(int(s), int(t)) for s, t in obj["tree_edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DecompositionError(f"malformed decomposition object: {exc}") from exc
    return TreeDecomposition(bags, tree_edges, types)
