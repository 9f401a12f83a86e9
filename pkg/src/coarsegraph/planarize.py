"""Rebuild a tree-decomposed graph as a tree of planar pieces.

Every decomposition node contributes a private copy of its bag: planar-type
nodes copy the whole torso, small-type nodes only a breadth-first spanning
tree of it.  Copies at the two ends of a decomposition edge are joined by a
single link edge placed at the smallest shared vertex, and the decomposition
tree is subdivided once per edge so the rebuilt decomposition has
single-vertex adhesions.  The constant pack bounds how far this surgery can
move distances; ``verify_planarization`` checks every bound exhaustively
against exact breadth-first distances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graphs import (
    Graph,
    GraphError,
    DistanceOracle,
    UNREACHABLE,
    graph_to_json,
    is_connected,
    multi_source_distances,
)
from .planarity import planarity_check
from .treedec import (
    SMALL,
    Clause,
    DecompositionError,
    TreeDecomposition,
    ValidationReport,
    adhesion_sets,
    decomposition_to_json,
    torso_with_map,
    validate,
)


@dataclass(frozen=True)
class ConstantPack:
    """Distortion constants measured from a graph and its decomposition.

    ``alpha`` bounds how far apart in the original graph the two endpoints
    of any rebuilt edge can be; ``beta`` bounds the rebuilt-graph distance
    between copies hosting the two ends of any original edge;
    ``surjectivity_radius`` bounds the rebuilt-graph distance from any copy
    to the canonical copy of the same vertex.
    """

    small_diameter: int
    small_size_cap: int
    trace_diameter: int
    adhesion_spread: int
    alpha: int
    beta: int
    surjectivity_radius: int

    def to_json(self) -> dict:
        # Keys fixed by the planarization file format.
        return {
            "A1": self.small_diameter,
            "A2": self.small_size_cap,
            "B": self.trace_diameter,
            "C": self.adhesion_spread,
            "alpha": self.alpha,
            "beta": self.beta,
            "surj_radius": self.surjectivity_radius,
        }


def compute_constants(
    G: Graph, td: TreeDecomposition, oracle: DistanceOracle | None = None
) -> ConstantPack:
    """Evaluate the constant definitions exactly.

    Empty maxima are 0; alpha is additionally floored at 1 so the distance
    bounds stay well-formed on degenerate instances.
    """
    oracle = oracle if oracle is not None else DistanceOracle(G)

    small_diameter = 0
    small_size = 0
    for t, bag in td.bags.items():
        if td.types[t] != SMALL:
            continue
        small_size = max(small_size, len(bag))
        members = sorted(bag)
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                d = oracle.distance(u, v)
                if d is UNREACHABLE:
                    raise GraphError("graph must be connected")
                small_diameter = max(small_diameter, int(d))
    small_size_cap = max(1, small_size)

    tree, node_rank = td.tree_graph()
    tree_oracle = DistanceOracle(tree)
    traces: dict[int, list[int]] = {}
    for t, bag in td.bags.items():
        for u in bag:
            traces.setdefault(u, []).append(node_rank[t])
    trace_diameter = 0
    for nodes in traces.values():
        for i, s in enumerate(nodes):
            for t in nodes[i + 1 :]:
                trace_diameter = max(trace_diameter, int(tree_oracle.distance(s, t)))

    adhesion_spread = 0
    for shared in adhesion_sets(td).values():
        members = sorted(shared)
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                d = oracle.distance(u, v)
                if d is UNREACHABLE:
                    raise GraphError("graph must be connected")
                adhesion_spread = max(adhesion_spread, int(d))

    alpha = max(small_diameter, adhesion_spread, 1)
    beta = (4 * small_size_cap + 2) * trace_diameter + small_size_cap
    surjectivity_radius = (2 * small_size_cap + 1) * trace_diameter
    return ConstantPack(
        small_diameter=small_diameter,
        small_size_cap=small_size_cap,
        trace_diameter=trace_diameter,
        adhesion_spread=adhesion_spread,
        alpha=alpha,
        beta=beta,
        surjectivity_radius=surjectivity_radius,
    )


@dataclass(frozen=True)
class Planarization:
    """The rebuilt graph plus everything needed to audit it.

    ``section`` maps each original vertex to its canonical copy (the one in
    the smallest-id node holding it); ``copies`` maps (node, original) to
    the copy id; ``origin`` is its inverse.
    """

    graph: Graph
    tree: TreeDecomposition
    section: dict[int, int]
    copies: dict[tuple[int, int], int]
    origin: dict[int, tuple[int, int]]
    link_vertices: dict[tuple[int, int], int]
    constants: ConstantPack
    small_as_trees: bool = True

    def to_json(self) -> dict:
        return {
            "gprime": graph_to_json(self.graph),
            "tprime": decomposition_to_json(self.tree),
            "f": [[u, copy] for u, copy in sorted(self.section.items())],
            "constants": self.constants.to_json(),
        }


def _spanning_tree_edges(piece: Graph) -> list[tuple[int, int]]:
    """Breadth-first spanning tree rooted at dense vertex 0."""
    seen = np.zeros(piece.n, dtype=bool)
    seen[0] = True
    reached = 1
    out: list[tuple[int, int]] = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in piece.neighbors(u):
            v = int(v)
            if not seen[v]:
                seen[v] = True
                reached += 1
                out.append((min(u, v), max(u, v)))
                queue.append(v)
    if reached != piece.n:
        raise GraphError("bag torso is disconnected")
    return out


def build_planarization(
    G: Graph,
    td: TreeDecomposition,
    small_as_trees: bool = True,
    oracle: DistanceOracle | None = None,
) -> Planarization:
    """Assemble the per-node copies, link edges, and subdivided tree."""
    if G.n == 0:
        raise GraphError("empty graph")
    if not is_connected(G):
        raise GraphError("graph must be connected")
    report = validate(G, td)
    if not report.ok:
        raise DecompositionError(
            "invalid decomposition: " + ", ".join(report.failed())
        )
    shared = adhesion_sets(td)
    for e, members in shared.items():
        if not members:
            raise DecompositionError(f"tree edge {e} has an empty adhesion set")

    nodes = sorted(td.bags)
    copies: dict[tuple[int, int], int] = {}
    origin: dict[int, tuple[int, int]] = {}
    labels: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    next_id = 0
    piece_edge_count = 0
    for t in nodes:
        piece, members = torso_with_map(G, td, t)
        for i, u in enumerate(members):
            copies[(t, u)] = next_id + i
            origin[next_id + i] = (t, u)
            labels[next_id + i] = f"{G.labels.get(u, str(u))}@{t}"
        if small_as_trees and td.types[t] == SMALL:
            local = _spanning_tree_edges(piece)
        else:
            local = list(piece.edges)
        for i, j in local:
            edges.append((next_id + i, next_id + j))
        piece_edge_count += len(local)
        next_id += piece.n

    link_vertices: dict[tuple[int, int], int] = {}
    for s, t in sorted(td.tree_edges):
        u = min(shared[(s, t)])
        link_vertices[(s, t)] = u
        a, b = copies[(s, u)], copies[(t, u)]
        edges.append((min(a, b), max(a, b)))
    graph = Graph(next_id, edges, labels)
    if graph.num_edges != piece_edge_count + len(td.tree_edges):
        raise GraphError("copy edges and link edges overlap")

    section: dict[int, int] = {}
    for t in nodes:
        for u in td.bags[t]:
            if u not in section:
                section[u] = copies[(t, u)]

    bags: dict[int, list[int]] = {}
    types: dict[int, str] = {}
    tree_edges: list[tuple[int, int]] = []
    mid = max(nodes) + 1
    for t in nodes:
        bags[t] = [copies[(t, u)] for u in sorted(td.bags[t])]
        types[t] = td.types[t]
    for s, t in sorted(td.tree_edges):
        u = link_vertices[(s, t)]
        bags[mid] = [copies[(s, u)], copies[(t, u)]]
        types[mid] = SMALL
        tree_edges.append((s, mid))
        tree_edges.append((mid, t))
        mid += 1
    tree = TreeDecomposition(bags, tree_edges, types)

    constants = compute_constants(G, td, oracle)
    return Planarization(
        graph=graph,
        tree=tree,
        section=section,
        copies=copies,
        origin=origin,
        link_vertices=link_vertices,
        constants=constants,
        small_as_trees=small_as_trees,
    )


@dataclass
class PlanReport(ValidationReport):
    """Clause outcomes plus the measured two-sided distance ratios."""

    measured_shrink: float = 0.0
    measured_stretch: float = 0.0

    def to_json(self) -> dict:
        base = super().to_json()
        base["measured"] = {
            "max_original_over_rebuilt": self.measured_shrink,
            "max_rebuilt_over_original": self.measured_stretch,
        }
        return base


def verify_planarization(G: Graph, td: TreeDecomposition, plan: Planarization) -> PlanReport:
    """Exhaustively audit every distance bound the construction promises.

    Uses exact all-pairs distances on both graphs.  The two sandwich
    directions are checked against alpha (original distance per rebuilt
    step) and beta (rebuilt distance per original step); the measured best
    ratios are reported alongside.
    """
    report = PlanReport()
    cp = plan.constants
    dist_g = DistanceOracle(G).matrix
    dist_p = DistanceOracle(plan.graph).matrix

    # (1) bag pairs: torso distance can undershoot by at most the adhesion
    # spread (floored at 1, since torso edges inside a bag are real edges).
    effective_spread = max(cp.adhesion_spread, 1)
    ok = True
    witness = None
    for t in sorted(td.bags):
        piece, members = torso_with_map(G, td, t)
        sub = dist_g[np.ix_(members, members)]
        local = DistanceOracle(piece).matrix
        if not np.all(np.isfinite(local)):
            ok, witness = False, f"torso of node {t} is disconnected"
            break
        if np.any(sub > effective_spread * local):
            i, j = np.argwhere(sub > effective_spread * local)[0]
            ok = False
            witness = (
                f"node {t}: d({members[i]},{members[j]})={int(sub[i, j])} "
                f"> {effective_spread}*torso {int(local[i, j])}"
            )
            break
    report.clauses.append(Clause("torso_distance_lower_bound", ok, witness))

    # (2) every rebuilt edge joins copies of nearby originals.
    ok, witness = True, None
    for x, y in plan.graph.edges:
        u, v = plan.origin[x][1], plan.origin[y][1]
        if dist_g[u, v] > cp.alpha:
            ok = False
            witness = f"copy edge {x}-{y}: d_G({u},{v})={int(dist_g[u, v])} > alpha={cp.alpha}"
            break
    report.clauses.append(Clause("copy_edge_displacement", ok, witness))

    holders: dict[int, list[int]] = {}
    for t in sorted(td.bags):
        for u in td.bags[t]:
            holders.setdefault(u, []).append(t)

    # (3) original edges lift to short rebuilt paths, whichever hosting
    # copies are chosen on either side.
    ok, witness = True, None
    for u, v in G.edges:
        for s in holders[u]:
            for t in holders[v]:
                d = dist_p[plan.copies[(s, u)], plan.copies[(t, v)]]
                if d > cp.beta:
                    ok = False
                    witness = (
                        f"edge {u}-{v} via nodes {s},{t}: "
                        f"rebuilt distance {d:g} > beta={cp.beta}"
                    )
                    break
            if not ok:
                break
        if not ok:
            break
    report.clauses.append(Clause("edge_lift_bounded", ok, witness))

    # (4) all copies of one vertex stay coherent.
    ok, witness = True, None
    for u, ts in holders.items():
        for i, s in enumerate(ts):
            for t in ts[i + 1 :]:
                d = dist_p[plan.copies[(s, u)], plan.copies[(t, u)]]
                if d > cp.surjectivity_radius:
                    ok = False
                    witness = (
                        f"copies of {u} at nodes {s},{t} sit {d:g} apart "
                        f"> {cp.surjectivity_radius}"
                    )
                    break
            if not ok:
                break
        if not ok:
            break
    report.clauses.append(Clause("copy_coherence", ok, witness))

    # (5) two-sided sandwich through the section map, vectorized.
    f = np.array([plan.section[u] for u in range(G.n)], dtype=np.int64)
    through = dist_p[np.ix_(f, f)]
    off = ~np.eye(G.n, dtype=bool)
    shrink_ok = np.all(dist_g[off] <= cp.alpha * through[off])
    stretch_ok = np.all(through[off] <= cp.beta * dist_g[off])
    if G.n > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            report.measured_shrink = float(np.max(dist_g[off] / through[off]))
            report.measured_stretch = float(np.max(through[off] / dist_g[off]))
    ok = bool(shrink_ok and stretch_ok)
    witness = None
    if not ok:
        witness = (
            f"measured original/rebuilt={report.measured_shrink:.3f} (alpha={cp.alpha}), "
            f"rebuilt/original={report.measured_stretch:.3f} (beta={cp.beta})"
        )
    report.clauses.append(Clause("global_sandwich", ok, witness))

    # (6) the section image is dense in the rebuilt graph.
    dsec = multi_source_distances(plan.graph, sorted(plan.section.values()))
    far = np.max(dsec)
    ok = bool(np.all(np.isfinite(dsec)) and far <= cp.surjectivity_radius)
    witness = None if ok else f"farthest copy sits {far} from the section image"
    report.clauses.append(Clause("section_dense", ok, witness))

    # (7) the rebuilt decomposition is valid over the rebuilt graph, with
    # single-vertex adhesions and one link edge per original tree edge.
    sub_report = validate(plan.graph, plan.tree)
    sizes = {len(a) for a in adhesion_sets(plan.tree).values()}
    unit = sizes <= {1}
    links = sum(
        1 for x, y in plan.graph.edges if plan.origin[x][0] != plan.origin[y][0]
    )
    ok = sub_report.ok and unit and links == len(td.tree_edges)
    witness = None
    if not ok:
        witness = (
            f"rebuilt decomposition failed={sub_report.failed()}, "
            f"adhesion sizes={sorted(sizes)}, link edges={links}"
        )
    report.clauses.append(Clause("decomposition_rebuilt", ok, witness))

    # (8) with small bags replaced by trees, every piece is planar and the
    # link edges attach them tree-wise, so the whole rebuilt graph must be.
    if plan.small_as_trees:
        pr = planarity_check(plan.graph)
        ok = pr.is_planar
        witness = None if ok else f"rebuilt graph contains a {pr.witness_kind}"
        report.clauses.append(Clause("piece_planarity", ok, witness))

    return report
