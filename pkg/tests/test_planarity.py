"""Certified planarity checks: rotation systems on yes, Kuratowski on no."""

import numpy as np
from hypothesis import given, settings, strategies as st

from coarsegraph import (
    Graph,
    count_faces,
    classify_kuratowski,
    disjoint_union,
    planarity_check,
    subdivide,
    verify_rotation_system,
)
from coarsegraph.sources import square_grid

from .oracles import random_graph


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a, b):
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def test_k4_is_planar_with_four_faces():
    res = planarity_check(complete(4))
    assert res.is_planar
    assert verify_rotation_system(complete(4), res.rotation_system)
    assert count_faces(res.rotation_system) == 4  # Euler: 4 - 6 + F = 2


def test_k5_yields_a_classified_witness():
    res = planarity_check(complete(5))
    assert not res.is_planar
    assert res.witness_kind == "K5"
    assert classify_kuratowski(complete(5), res.witness_edges) == "K5"


def test_k33_yields_a_classified_witness():
    g = complete_bipartite(3, 3)
    res = planarity_check(g)
    assert not res.is_planar
    assert res.witness_kind == "K33"
    assert classify_kuratowski(g, res.witness_edges) == "K33"


def test_k6_witness_is_one_of_the_two_kinds():
    res = planarity_check(complete(6))
    assert not res.is_planar
    assert res.witness_kind in ("K5", "K33")
    assert classify_kuratowski(complete(6), res.witness_edges) == res.witness_kind


def test_subdivided_k5_still_caught():
    g = subdivide(complete(5), 2)
    res = planarity_check(g)
    assert not res.is_planar
    assert classify_kuratowski(g, res.witness_edges) == res.witness_kind


def test_disconnected_planar_graph():
    g = disjoint_union([square_grid(3), complete(4), Graph(1, [])])
    res = planarity_check(g)
    assert res.is_planar
    assert verify_rotation_system(g, res.rotation_system)


def test_planar_plus_k5_component_is_not_planar():
    g = disjoint_union([square_grid(3), complete(5)])
    res = planarity_check(g)
    assert not res.is_planar
    assert classify_kuratowski(g, res.witness_edges) == "K5"


def test_rotation_verifier_rejects_a_shuffled_order():
    g = complete(4)
    res = planarity_check(g)
    rot = dict(res.rotation_system)
    # K4 has a unique planar rotation up to reflection; swapping two
    # neighbors of one vertex breaks Euler's formula.
    v = next(v for v in rot if len(rot[v]) == 3)
    a, b, c = rot[v]
    rot[v] = (b, a, c)
    assert not verify_rotation_system(g, rot)


def test_rotation_verifier_rejects_wrong_adjacencies():
    g = complete(4)
    rot = dict(planarity_check(g).rotation_system)
    rot[0] = rot[0][:-1]
    assert not verify_rotation_system(g, rot)


def test_classifier_rejects_non_witness_edges():
    g = complete(5)
    assert classify_kuratowski(g, g.edges[:4]) is None
    assert classify_kuratowski(complete(4), complete(4).edges) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 14), st.floats(0.1, 0.6))
def test_every_verdict_carries_a_valid_certificate(seed, n, p):
    g = Graph(n, random_graph(np.random.default_rng(seed), n, p))
    res = planarity_check(g)
    if res.is_planar:
        assert verify_rotation_system(g, res.rotation_system)
    else:
        assert classify_kuratowski(g, res.witness_edges) == res.witness_kind
