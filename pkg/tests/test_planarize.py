"""Rebuilding a graph from its decomposition with audited distance bounds."""

import dataclasses

import pytest

from coarsegraph import (
    DecompositionError,
    Graph,
    GraphError,
    TreeDecomposition,
    build_planarization,
    compute_constants,
    disjoint_union,
    dumps_canonical,
    graph_from_json,
    planarity_check,
    verify_planarization,
)
from coarsegraph.sources import tree_sum_planar

TWO_TRIANGLES = Graph(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])
TWO_TRIANGLES_TD = TreeDecomposition({0: [0, 1, 2], 1: [2, 3, 4]}, [(0, 1)])

CLAUSES = (
    "torso_distance_lower_bound",
    "copy_edge_displacement",
    "edge_lift_bounded",
    "copy_coherence",
    "global_sandwich",
    "section_dense",
    "decomposition_rebuilt",
    "piece_planarity",
)


def test_two_triangles_exact_constants():
    cp = compute_constants(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    assert cp.to_json() == {
        "A1": 1,
        "A2": 3,
        "B": 1,
        "C": 0,
        "alpha": 1,
        "beta": 17,
        "surj_radius": 7,
    }


def test_two_triangles_passes_every_clause():
    plan = build_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    rep = verify_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD, plan)
    assert tuple(c.name for c in rep.clauses) == CLAUSES
    assert rep.ok, rep.failed()
    assert rep.measured_shrink <= plan.constants.alpha
    assert rep.measured_stretch <= plan.constants.beta


def test_two_triangles_rebuilt_shape():
    plan = build_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    # Each small triangle becomes a 3-vertex spanning tree; one link edge.
    assert plan.graph.n == 6
    assert plan.graph.num_edges == 5
    assert len(plan.link_vertices) == 1
    assert plan.link_vertices[(0, 1)] == 2
    assert sorted(plan.section) == [0, 1, 2, 3, 4]


def test_json_payload_is_canonical_and_parseable():
    plan = build_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    obj = plan.to_json()
    assert set(obj) == {"gprime", "tprime", "f", "constants"}
    assert graph_from_json(obj["gprime"]) == plan.graph
    assert obj["f"] == [[u, plan.section[u]] for u in range(5)]
    dumps_canonical(obj)  # must serialize deterministically


def test_removing_the_link_edge_is_caught():
    plan = build_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    link = next(
        (x, y) for x, y in plan.graph.edges
        if plan.origin[x][0] != plan.origin[y][0]
    )
    cut = Graph(
        plan.graph.n,
        [e for e in plan.graph.edges if e != link],
        plan.graph.labels,
    )
    broken = dataclasses.replace(plan, graph=cut)
    rep = verify_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD, broken)
    assert not rep.ok
    assert "copy_coherence" in rep.failed() or "section_dense" in rep.failed()


def test_tampered_section_is_caught():
    plan = build_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD)
    section = dict(plan.section)
    section[0] = section[1]  # two originals claim one copy
    broken = dataclasses.replace(plan, section=section)
    rep = verify_planarization(TWO_TRIANGLES, TWO_TRIANGLES_TD, broken)
    assert "global_sandwich" in rep.failed()


def test_small_bag_spanning_tree_keeps_planarity():
    k5 = Graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    td = TreeDecomposition({0: range(5)}, [], {0: "small"})
    plan = build_planarization(k5, td)
    assert planarity_check(plan.graph).is_planar
    rep = verify_planarization(k5, td, plan)
    assert rep.ok, rep.failed()


def test_small_as_trees_false_keeps_all_edges():
    k5 = Graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    td = TreeDecomposition({0: range(5)}, [], {0: "small"})
    plan = build_planarization(k5, td, small_as_trees=False)
    assert plan.graph == k5
    rep = verify_planarization(k5, td, plan)
    assert rep.ok
    assert "piece_planarity" not in [c.name for c in rep.clauses]


def test_disconnected_graph_rejected():
    g = disjoint_union([Graph(2, [(0, 1)]), Graph(2, [(0, 1)])])
    td = TreeDecomposition({0: [0, 1], 1: [2, 3]}, [(0, 1)])
    with pytest.raises(GraphError):
        build_planarization(g, td)


def test_invalid_decomposition_rejected():
    td = TreeDecomposition({0: [0, 1, 2]}, [])  # drops vertices 3, 4
    with pytest.raises(DecompositionError):
        build_planarization(TWO_TRIANGLES, td)


def test_empty_adhesion_rejected():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    td = TreeDecomposition({0: [0, 1, 2], 1: [2, 3], 2: []},
                           [(0, 1), (1, 2)])
    with pytest.raises(DecompositionError):
        build_planarization(g, td)


def test_seeded_instances_verify_end_to_end():
    for seed in range(10):
        g, td = tree_sum_planar(seed=seed, pieces=4, piece_size=10,
                                small_fraction=0.4, max_adhesion=3)
        plan = build_planarization(g, td)
        rep = verify_planarization(g, td, plan)
        assert rep.ok, (seed, rep.failed())
        assert rep.measured_shrink <= plan.constants.alpha
        assert rep.measured_stretch <= plan.constants.beta
