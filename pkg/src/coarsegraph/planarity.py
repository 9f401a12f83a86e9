"""Certified planarity testing.

The raw test runs networkx's left-right algorithm, but its output is never
trusted as-is: a planar answer is re-verified by tracing the faces of the
returned rotation system and checking Euler's formula per component, and a
non-planar answer is re-verified by structurally checking the returned
witness subgraph to be a subdivision of K5 or K3,3 contained in the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
from networkx.algorithms.planarity import get_counterexample

from .graphs import Graph, GraphError


@dataclass(frozen=True)
class PlanarityResult:
    """Outcome of a certified planarity check.

    Exactly one of ``rotation_system`` (vertex -> clockwise neighbor order)
    and ``witness_edges`` (a K5 or K3,3 subdivision, kind in
    ``witness_kind``) is present.
    """

    is_planar: bool
    rotation_system: dict[int, tuple[int, ...]] | None = None
    witness_kind: str | None = None
    witness_edges: tuple[tuple[int, int], ...] | None = None


def count_faces(rotation_system: dict[int, tuple[int, ...]]) -> int:
    """Number of orbits of the face-tracing permutation."""
    position = {
        v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in rotation_system.items()
    }
    unused = {(u, v) for u, nbrs in rotation_system.items() for v in nbrs}
    faces = 0
    while unused:
        start = next(iter(unused))
        cur = start
        while True:
            unused.discard(cur)
            u, v = cur
            nbrs = rotation_system[v]
            cur = (v, nbrs[(position[v][u] + 1) % len(nbrs)])
            if cur == start:
                break
        faces += 1
    return faces


def verify_rotation_system(G: Graph, rotation_system: dict[int, tuple[int, ...]]) -> bool:
    """True iff the rotation system is a genus-0 (planar) embedding of G.

    Checks that the rotation lists are exactly the adjacencies, then Euler's
    formula V - E + F = 2 on every connected component.
    """
    if set(rotation_system) != set(range(G.n)):
        return False
    for v, nbrs in rotation_system.items():
        if sorted(nbrs) != sorted(G.neighbors(v).tolist()):
            return False
    from .graphs import connected_components

    for comp in connected_components(G):
        comp_set = set(comp)
        sub_rot = {v: rotation_system[v] for v in comp}
        e = sum(len(sub_rot[v]) for v in comp) // 2
        if e == 0:
            continue
        f = count_faces(sub_rot)
        if len(comp) - e + f != 2:
            return False
    return True


def classify_kuratowski(G: Graph, edges: tuple[tuple[int, int], ...]) -> str | None:
    """Return "K5" or "K33" when ``edges`` form a Kuratowski subdivision
    inside G, else None."""
    edge_set = set(edges)
    if not edge_set <= G.edge_set:
        return None
    adj: dict[int, list[int]] = {}
    for u, v in edge_set:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    degs = {v: len(ns) for v, ns in adj.items()}
    branch = sorted(v for v, d in degs.items() if d >= 3)
    if any(d < 2 for d in degs.values()):
        return None
    if sorted(degs[b] for b in branch) == [4, 4, 4, 4, 4]:
        kind = "K5"
    elif sorted(degs[b] for b in branch) == [3, 3, 3, 3, 3, 3]:
        kind = "K33"
    else:
        return None
    if any(degs[v] != 2 for v in adj if v not in branch):
        return None
    # Walk the degree-2 chains from each branch vertex; every edge must be
    # used exactly once and every chain must join two distinct branch vertices.
    used = set()
    links: list[tuple[int, int]] = []
    for b in branch:
        for first in adj[b]:
            if (b, first) in used:
                continue
            prev, cur = b, first
            used.add((prev, cur))
            used.add((cur, prev))
            while cur not in branch:
                nxts = [w for w in adj[cur] if w != prev]
                if len(nxts) != 1:
                    return None
                prev, cur = cur, nxts[0]
                used.add((prev, cur))
                used.add((cur, prev))
            if cur == b:
                return None
            links.append((min(b, cur), max(b, cur)))
    if len(used) != 2 * len(edge_set):
        return None
    # Each chain is recorded once (its reverse walk is blocked by ``used``),
    # so duplicates would mean parallel chains between the same branch pair.
    link_set = set(links)
    if len(link_set) != len(links):
        return None
    if kind == "K5":
        want = {(branch[i], branch[j]) for i in range(5) for j in range(i + 1, 5)}
        return "K5" if link_set == want else None
    # K33: the link graph must be complete bipartite with parts of size 3.
    part = {branch[0]: 0}
    queue = [branch[0]]
    link_adj = {b: [] for b in branch}
    for a, b in link_set:
        link_adj[a].append(b)
        link_adj[b].append(a)
    while queue:
        x = queue.pop()
        for y in link_adj[x]:
            if y not in part:
                part[y] = 1 - part[x]
                queue.append(y)
            elif part[y] == part[x]:
                return None
    if len(part) != 6:
        return None
    side = sorted(b for b in branch if part[b] == 0)
    other = sorted(b for b in branch if part[b] == 1)
    if len(side) != 3 or len(other) != 3:
        return None
    want = {(min(a, b), max(a, b)) for a in side for b in other}
    return "K33" if link_set == want else None


def planarity_check(G: Graph) -> PlanarityResult:
    """Certified planarity decision for G."""
    nxg = nx.Graph()
    nxg.add_nodes_from(range(G.n))
    nxg.add_edges_from(G.edges)
    ok, embedding = nx.check_planarity(nxg, counterexample=False)
    if ok:
        data = embedding.get_data()
        rotation = {v: tuple(data.get(v, ())) for v in range(G.n)}
        if not verify_rotation_system(G, rotation):
            raise GraphError("planar embedding failed independent verification")
        return PlanarityResult(is_planar=True, rotation_system=rotation)
    witness_nxg = get_counterexample(nxg)
    witness = tuple(
        sorted((u, v) if u < v else (v, u) for u, v in witness_nxg.edges())
    )
    kind = classify_kuratowski(G, witness)
    if kind is None:
        raise GraphError("non-planarity witness failed independent verification")
    return PlanarityResult(is_planar=False, witness_kind=kind, witness_edges=witness)
