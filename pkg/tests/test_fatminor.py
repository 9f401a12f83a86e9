"""Fat-minor certificates: verifier clauses, explicit construction, search."""

import dataclasses

import pytest

from coarsegraph import (
    FatMinorCertificate,
    Graph,
    GraphError,
    certificate_from_json,
    claw_construction,
    search_fat_minor,
    verify_certificate,
)
from coarsegraph.sources import square_grid

CLAUSES = (
    "vertices_in_range",
    "branch_sets_nonempty",
    "branch_sets_disjoint",
    "branch_sets_connected",
    "branch_separation",
    "paths_match_edges",
    "paths_simple",
    "path_endpoints",
    "path_internals_avoid_branch_sets",
    "path_separation",
    "path_branch_separation",
)

K2 = Graph(2, [(0, 1)])


def base_cert(**overrides):
    """Single fat edge across the top row of the 4x4 grid, fatness 2."""
    fields = dict(
        pattern=K2,
        branch_sets={0: (0,), 1: (3,)},
        paths={(0, 1): (0, 1, 2, 3)},
        fatness=2,
    )
    fields.update(overrides)
    return FatMinorCertificate(**fields)


GRID = square_grid(4)


def failed(cert, host=GRID):
    return verify_certificate(host, cert).failed()


# ---------------------------------------------------------------------------
# verifier

def test_valid_certificate_passes_every_clause():
    rep = verify_certificate(GRID, base_cert())
    assert tuple(c.name for c in rep.clauses) == CLAUSES
    assert rep.ok


def test_out_of_range_vertex():
    rep = verify_certificate(GRID, base_cert(branch_sets={0: (0,), 1: (99,)}))
    assert rep.failed() == ["vertices_in_range"]
    assert "99" in rep.clauses[0].witness


def test_empty_branch_set():
    bad = failed(base_cert(branch_sets={0: (0,), 1: ()}))
    assert "branch_sets_nonempty" in bad
    assert "path_endpoints" in bad  # the path has nowhere to land


def test_overlapping_branch_sets():
    cert = base_cert(branch_sets={0: (0, 1), 1: (1, 2)},
                     paths={(0, 1): (0, 1, 2)})
    assert "branch_sets_disjoint" in failed(cert)


def test_disconnected_branch_set():
    # 8 = (2,0) is nowhere near 0 = (0,0) inside the set.
    assert failed(base_cert(branch_sets={0: (0, 8), 1: (3,)})) == [
        "branch_sets_connected"
    ]


def test_branch_sets_too_close():
    cert = base_cert(branch_sets={0: (0,), 1: (1,)}, paths={(0, 1): (0, 1)})
    rep = verify_certificate(GRID, cert)
    assert rep.failed() == ["branch_separation"]
    assert "sit 1 apart, need >= 2" in rep.clauses[4].witness


def test_missing_path():
    assert failed(base_cert(paths={})) == ["paths_match_edges"]


def test_foreign_path():
    cert = base_cert(paths={(0, 1): (0, 1, 2, 3), (0, 5): (0, 4)})
    assert "paths_match_edges" in failed(cert)


def test_path_jumping_a_non_edge():
    assert failed(base_cert(paths={(0, 1): (0, 2, 3)})) == ["paths_simple"]


def test_path_repeating_a_vertex():
    cert = base_cert(paths={(0, 1): (0, 1, 0, 1, 2, 3)})
    assert "paths_simple" in failed(cert)


def test_path_with_wrong_endpoints():
    assert failed(base_cert(paths={(0, 1): (1, 2)})) == ["path_endpoints"]


def test_single_vertex_path_cannot_serve_both_ends():
    cert = base_cert(branch_sets={0: (0,), 1: (1,)}, paths={(0, 1): (0,)})
    assert "path_endpoints" in failed(cert)


def test_path_through_a_branch_set():
    cert = base_cert(branch_sets={0: (0, 1), 1: (3,)})
    assert failed(cert) == ["path_internals_avoid_branch_sets"]


def test_paths_too_close_to_each_other():
    two_edges = Graph(4, [(0, 1), (2, 3)])
    good = FatMinorCertificate(
        pattern=two_edges,
        branch_sets={0: (0,), 1: (3,), 2: (12,), 3: (15,)},
        paths={(0, 1): (0, 1, 2, 3), (2, 3): (12, 13, 14, 15)},
        fatness=2,
    )
    assert verify_certificate(GRID, good).ok
    # Reroute the bottom path through row 1, within one step of the top row
    # but still two steps from every branch set.
    detour = dataclasses.replace(
        good, paths={(0, 1): (0, 1, 2, 3), (2, 3): (12, 8, 9, 5, 6, 10, 11, 15)}
    )
    assert failed(detour) == ["path_separation"]


def test_path_too_close_to_a_foreign_branch_set():
    pattern = Graph(3, [(0, 1)])  # third vertex isolated in the pattern
    good = FatMinorCertificate(
        pattern=pattern,
        branch_sets={0: (0,), 1: (3,), 2: (9,)},
        paths={(0, 1): (0, 1, 2, 3)},
        fatness=2,
    )
    assert verify_certificate(GRID, good).ok
    close = dataclasses.replace(good, branch_sets={0: (0,), 1: (3,), 2: (5,)})
    assert failed(close) == ["path_branch_separation"]


def test_unreachable_counts_as_separated():
    two = Graph(8, [(i, i + 1) for i in range(3)] + [(i, i + 1) for i in range(4, 7)])
    cert = FatMinorCertificate(
        pattern=Graph(4, [(0, 1), (2, 3)]),
        branch_sets={0: (0,), 1: (3,), 2: (4,), 3: (7,)},
        paths={(0, 1): (0, 1, 2, 3), (2, 3): (4, 5, 6, 7)},
        fatness=100,
    )
    rep = verify_certificate(two, cert)
    # Cross-component clauses pass; same-component distances fail at k=100.
    assert "path_separation" not in rep.failed()
    assert "branch_separation" in rep.failed()


def test_fatness_monotone_downward():
    window, cert = claw_construction(2, 4)
    assert verify_certificate(window.graph, cert).ok
    for smaller in (3, 2, 1, 0):
        weaker = dataclasses.replace(cert, fatness=smaller)
        assert verify_certificate(window.graph, weaker).ok


# ---------------------------------------------------------------------------
# explicit construction

@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_claw_construction_verifies(m, k):
    window, cert = claw_construction(m, k)
    assert cert.fatness == k
    assert cert.pattern.n == 2 * m
    assert cert.pattern.num_edges == m * m
    rep = verify_certificate(window.graph, cert)
    assert rep.ok, rep.failed()


def test_claw_construction_shape_is_frozen():
    window, cert = claw_construction(3, 1)
    assert window.radius == 6
    assert window.graph.n == 247
    assert sorted(cert.pattern.labels.values()) == sorted(
        [f"spine{i}" for i in range(3)] + [f"ray{j}" for j in range(3)]
    )


def test_claw_construction_rejects_bad_parameters():
    with pytest.raises(GraphError):
        claw_construction(0, 1)
    with pytest.raises(GraphError):
        claw_construction(2, -1)


def test_certificate_json_round_trip():
    _, cert = claw_construction(2, 2)
    back = certificate_from_json(cert.to_json())
    assert back.pattern == cert.pattern
    assert back.branch_sets == cert.branch_sets
    assert back.paths == cert.paths
    assert back.fatness == cert.fatness


# ---------------------------------------------------------------------------
# search

def test_search_finds_a_fat_edge_in_a_path():
    host = Graph(10, [(i, i + 1) for i in range(9)])
    cert = search_fat_minor(host, K2, 3)
    assert cert is not None
    assert cert.fatness == 3
    assert verify_certificate(host, cert).ok


def test_search_finds_a_fat_star_in_a_grid():
    host = square_grid(9)
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    cert = search_fat_minor(host, star, 2, seed=1)
    assert cert is not None
    assert verify_certificate(host, cert).ok


def test_search_gives_up_on_a_fat_triangle_in_a_path():
    # Any route between the outer branch sets would have to cross the middle
    # one, so no certificate exists at fatness >= 1.
    host = Graph(20, [(i, i + 1) for i in range(19)])
    triangle = Graph(3, [(0, 1), (0, 2), (1, 2)])
    assert search_fat_minor(host, triangle, 1, budget=50_000) is None


def test_search_respects_the_budget():
    host = square_grid(6)
    assert search_fat_minor(host, K2, 1, budget=1) is None


def test_search_is_deterministic_per_seed():
    host = square_grid(8)
    a = search_fat_minor(host, K2, 2, seed=7)
    b = search_fat_minor(host, K2, 2, seed=7)
    assert a is not None and a.to_json() == b.to_json()
