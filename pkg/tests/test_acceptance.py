"""Top-level acceptance checks, one test per shipped guarantee.

Each test is a self-contained pass/fail gate over seeded instances, with
the advertised constants as hard ceilings and exact integer comparisons
throughout.  Run with ``pytest -v tests/test_acceptance.py`` for the
one-line-per-criterion view.
"""

import time

import numpy as np
import pytest

from coarsegraph import (
    DistanceOracle,
    FatMinorCertificate,
    Graph,
    QIMap,
    all_pairs_distances,
    attach_pendants,
    bfs_distances,
    bfs_layering,
    blowup,
    build_planarization,
    check_cover,
    claw_construction,
    crossing_formula,
    crossing_upper_bound,
    disjoint_union,
    embed_power_blowup,
    grid_shift_cover,
    interval_slice_cover,
    layered_combine,
    pendant_power_embedding,
    planarity_check,
    planarize_drawing,
    power,
    prune_to_bounded_degree,
    random_one_planar_drawing,
    realize_in_power,
    square_grid,
    strong_product,
    subdivide,
    subset_diameter,
    tree_band_cover,
    tree_sum_planar,
    verify_certificate,
    verify_planarization,
)
from coarsegraph.graphs import UNREACHABLE

from .oracles import random_graph


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_tree(rng, n, shape):
    if shape == 0:  # uniform attachment: shallow, bushy
        parents = [int(rng.integers(0, v)) for v in range(1, n)]
    elif shape == 1:  # path-biased: deep
        parents = [
            v - 1 if rng.random() < 0.7 else int(rng.integers(0, v))
            for v in range(1, n)
        ]
    else:  # recent attachment: caterpillar-like
        parents = [int(rng.integers(max(0, v - 10), v)) for v in range(1, n)]
    return Graph(n, [(p, v) for v, p in enumerate(parents, start=1)])


# ---------------------------------------------------------------------------
# 1. tree-sum planarization soundness, 100 seeds

def test_c01_planarization_sound_on_100_seeded_tree_sums():
    started = time.monotonic()
    planar_outcomes = 0
    for seed in range(100):
        g, td = tree_sum_planar(
            seed,
            pieces=5 + seed % 14,
            piece_size=10 + (seed * 7) % 16,
            small_fraction=0.3,
            max_adhesion=3,
        )
        assert g.n <= 500 and len(td.bags) <= 20
        plan = build_planarization(g, td, small_as_trees=True)
        report = verify_planarization(g, td, plan)
        assert report.ok, f"seed {seed}: {report.failed()}"
        planar_outcomes += planarity_check(plan.graph).is_planar
    assert planar_outcomes == 100
    assert time.monotonic() - started < 60


# ---------------------------------------------------------------------------
# 2. exact constants on the two-triangle fixture

def test_c02_two_triangle_constants_are_exact():
    g = Graph(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])
    from coarsegraph.treedec import TreeDecomposition

    td = TreeDecomposition({0: (0, 1, 2), 1: (2, 3, 4)}, [(0, 1)])
    plan = build_planarization(g, td, small_as_trees=True)
    c = plan.constants.to_json()
    assert {k: c[k] for k in ("A1", "A2", "B", "C", "alpha", "beta")} == {
        "A1": 1, "A2": 3, "B": 1, "C": 0, "alpha": 1, "beta": 17,
    }
    report = verify_planarization(g, td, plan)
    assert report.ok
    assert report.measured_shrink <= c["alpha"]
    assert report.measured_stretch <= c["beta"]


# ---------------------------------------------------------------------------
# 3 + 4. planted quasi-isometries: blow-up embedding and pruning bounds

def planted_maps(seed):
    """Three maps per seed: identity, subdivision contraction, blow-up
    projection, each onto a small tree or grid base."""
    rng = np.random.default_rng(seed)
    if seed % 2 == 0:
        base = random_tree(rng, 20 + 2 * seed, shape=0)
    else:
        base = square_grid(3 + seed % 3)
    sub = subdivide(base, 1)
    contraction = list(range(base.n)) + [base.edges[e][0] for e in range(base.num_edges)]
    blown = blowup(base, 2)
    return [
        QIMap(base, base, tuple(range(base.n))),
        QIMap(sub, base, tuple(contraction)),
        QIMap(blown, base, tuple(v // 2 for v in range(blown.n))),
    ]


def all_planted():
    return [f for seed in range(10) for f in planted_maps(seed)]


def test_c03_power_blowup_embedding_on_30_planted_instances():
    rate = 2
    instances = all_planted()
    assert len(instances) == 30
    for f in instances:
        emb = embed_power_blowup(f, rate)
        clauses = {c.name: c.ok for c in emb.report.clauses}
        assert clauses["injective"] and clauses["edge_preserving"]
        assert emb.fiber_cap <= f.domain.max_degree() ** (rate * rate)
        assert emb.cap_within_paper_bound


def test_c04_pruning_bounds_on_30_planted_instances():
    rate = 2
    span = rate * rate
    for f in all_planted():
        pruned = prune_to_bounded_degree(f, rate)
        assert pruned.report.ok
        assert pruned.subgraph.max_degree() <= f.domain.max_degree() ** (2 * span)
        # independent exact re-check of the pair stretch bound
        dom = all_pairs_distances(f.domain).matrix
        sub = all_pairs_distances(pruned.subgraph).matrix
        fx = np.fromiter(
            (pruned.restricted(x) for x in range(f.domain.n)), dtype=np.int64
        )
        image_dist = sub[np.ix_(fx, fx)]
        finite = np.isfinite(dom)
        assert np.all(image_dist[finite] <= span * dom[finite])


# ---------------------------------------------------------------------------
# 5. crossing budgets on grid hosts and seeded one-crossing drawings

def test_c05_crossing_bounds_and_drawing_planarization():
    host = square_grid(6)
    assert host.max_degree() == 4
    for k, ceiling in ((1, 16), (2, 192)):
        assert crossing_formula(k, 4) == ceiling
        kth = power(host, k)
        for seed in range(20):
            rng = np.random.default_rng(1000 * k + seed)
            edges = [e for e in kth.edges if rng.random() < 0.4]
            guest = Graph(host.n, edges)
            real = realize_in_power(host, guest, k, range(host.n))
            bound = crossing_upper_bound(real)
            assert bound.measured_max <= ceiling

    for seed in range(20):
        g, drawing = random_one_planar_drawing(10, seed)
        replaced = planarize_drawing(g, drawing)
        assert replaced.planar
        assert replaced.power_exponent <= 2
        for u, v in g.edges:  # original graph sits inside the square
            assert bfs_distances(replaced.graph, u)[v] <= 2


# ---------------------------------------------------------------------------
# 6. two-family tree covers, 50 random trees up to 10^4 vertices

def test_c06_tree_covers_within_dilation_6():
    started = time.monotonic()
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = 10_000 if seed == 0 else int(rng.integers(500, 10_001))
        tree = random_tree(rng, n, shape=seed % 3)
        for r in (1, 2, 4, 8, 16):
            cover = tree_band_cover(tree, 0, r)
            assert cover.family_count <= 2  # one family when a band covers everything
            report = check_cover(tree, cover)
            assert report.ok, f"seed {seed} r={r}: {report.failed()}"
            assert report.measured_bound <= 6 * r
    assert time.monotonic() - started < 120


# ---------------------------------------------------------------------------
# 7. three-family grid covers with dilation 4

def test_c07_grid_covers_within_dilation_4():
    for vertices, side in ((16, 4), (64, 8), (256, 16)):
        grid = square_grid(side)
        assert grid.n == vertices
        for r in (1, 2, 4, 8):
            cover = grid_shift_cover(side, r)
            assert cover.family_count == 3
            report = check_cover(grid, cover)
            assert report.ok, f"side {side} r={r}: {report.failed()}"
            assert report.measured_bound <= 4 * r


# ---------------------------------------------------------------------------
# 8. layered combination on the 64-vertex grid

def test_c08_layered_covers_within_4_families_dilation_10():
    grid = square_grid(8)
    layering = bfs_layering(grid, [0])  # corner layering
    axis = np.array([int(grid.labels[v].strip("()").split(",")[1]) for v in range(grid.n)])
    worst_families = 0
    for r in (2, 4, 8):
        def slicer(graph, verts, rr):
            return interval_slice_cover(graph, axis, rr, vertices=verts)

        cover = layered_combine(grid, layering, r, slicer)
        report = check_cover(grid, cover)
        assert report.ok, f"r={r}: {report.failed()}"
        assert cover.family_count <= 4
        assert report.measured_bound <= 10 * r
        worst_families = max(worst_families, cover.family_count)
    note = (
        f"layered combination used up to {worst_families} families on the grid, "
        "one more than the 3 achieved by direct diagonal block shifts: the "
        "generic layering route pays the n+2 family price while the "
        "grid-specific route reaches n+1."
    )
    assert worst_families == 4 and "4 families" in note
    print(note)


# ---------------------------------------------------------------------------
# 9. fat-minor certificates and 200 targeted mutations

MUTATIONS = (
    "empty_branch_set",
    "out_of_range_vertex",
    "overlap_branch_sets",
    "skip_path_vertex",
    "truncate_path",
)


def mutate_certificate(cert, seed):
    """Break exactly one aspect of a valid certificate; return the broken
    certificate and the clause whose rejection must name the damage."""
    rng = np.random.default_rng(seed)
    kind = MUTATIONS[seed % len(MUTATIONS)]
    sets = dict(cert.branch_sets)
    paths = dict(cert.paths)
    set_ids = sorted(sets)
    path_ids = sorted(paths)
    if kind == "empty_branch_set":
        sets[int(rng.choice(set_ids))] = ()
        target = "branch_sets_nonempty"
    elif kind == "out_of_range_vertex":
        v = int(rng.choice(set_ids))
        sets[v] = sets[v] + (10**9,)
        target = "vertices_in_range"
    elif kind == "overlap_branch_sets":
        a, b = (int(x) for x in rng.choice(set_ids, size=2, replace=False))
        sets[b] = sets[b] + (sets[a][0],)
        target = "branch_sets_disjoint"
    elif kind == "skip_path_vertex":
        e = path_ids[int(rng.integers(len(path_ids)))]
        p = paths[e]
        assert len(p) >= 4  # geodesic, so p[0] and p[2] are non-adjacent
        paths[e] = (p[0],) + p[2:]
        target = "paths_simple"
    else:
        e = path_ids[int(rng.integers(len(path_ids)))]
        paths[e] = paths[e][:-1]
        target = "path_endpoints"
    broken = FatMinorCertificate(cert.pattern, sets, paths, cert.fatness)
    return broken, target


def test_c09_claw_certificates_and_200_mutations():
    fixtures = {}
    for k in (1, 2, 4, 8):
        window, cert = claw_construction(3, k)
        report = verify_certificate(window.graph, cert)
        assert report.ok, f"k={k}: {report.failed()}"
        fixtures[k] = (window.graph, cert)

    for seed in range(200):
        host, cert = fixtures[(1, 2, 4, 8)[seed % 4]]
        broken, target = mutate_certificate(cert, seed)
        report = verify_certificate(host, broken)
        assert not report.ok, f"seed {seed}: mutation survived"
        assert target in report.failed(), (
            f"seed {seed}: expected {target}, got {report.failed()}"
        )


# ---------------------------------------------------------------------------
# 10. exact identities of the metric operations

def test_c10_graph_operation_identities():
    p3 = path(3)
    triangle = Graph(3, [(0, 1), (1, 2), (0, 2)])
    k1 = Graph(1, [])
    k2 = Graph(2, [(0, 1)])
    k4 = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    k5 = Graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    k33 = Graph(6, [(i, j + 3) for i in range(3) for j in range(3)])

    # single-source distances
    assert list(bfs_distances(p3, 0)) == [0, 1, 2]
    assert bfs_distances(p3, 1)[1] == 0
    grid5 = square_grid(5)
    assert bfs_distances(grid5, 0)[grid5.n - 1] == 8

    # all-pairs table
    apsp = all_pairs_distances(k4).matrix
    assert np.all(apsp[~np.eye(4, dtype=bool)] == 1)
    two_edges = Graph(4, [(0, 1), (2, 3)])
    assert all_pairs_distances(two_edges).matrix[0, 2] == UNREACHABLE
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 201))
        g = Graph(n, random_graph(rng, n, min(1.0, 3.0 / n)))
        table = all_pairs_distances(g).matrix
        for s in range(n):
            assert np.array_equal(table[s], bfs_distances(g, s))

    # powers
    assert power(p3, 1) == p3
    assert power(p3, 2) == triangle
    assert power(square_grid(3), 2).degree(4) == 8

    # blow-ups
    assert blowup(p3, 1) == p3
    assert blowup(k1, 3).num_edges == 3 and blowup(k1, 3).n == 3
    assert blowup(k2, 2).num_edges == 6 and blowup(k2, 2).n == 4

    # strong products
    assert strong_product(p3, k1) == p3
    b = strong_product(k2, k2)
    assert b.n == 4 and b.num_edges == 6
    king = strong_product(p3, p3)
    assert king.degree(4) == 8

    # subdivisions
    assert subdivide(p3, 0) == p3
    c6 = subdivide(triangle, 1)
    assert c6.n == 6 and c6.num_edges == 6 and c6.max_degree() == 2
    sub = subdivide(square_grid(3), 2)
    inner = all_pairs_distances(sub).matrix
    outer = all_pairs_distances(square_grid(3)).matrix
    assert np.array_equal(inner[:9, :9], 3 * outer)

    # pendants
    for k in (1, 3):
        withp = attach_pendants(square_grid(3), k)
        assert withp.n == 9 * (1 + k)
        assert all(withp.degree(v) == 1 for v in range(9, withp.n))
    star = attach_pendants(k1, 2)
    assert star.n == 3 and star.num_edges == 2 and star.degree(0) == 2
    for seed in range(20):
        g, drawing = random_one_planar_drawing(8, seed)
        planar = planarize_drawing(g, drawing).graph
        assert planarity_check(planar).is_planar
        assert planarity_check(attach_pendants(planar, 2)).is_planar

    # pendant-power embeddings are injective and verified
    for base, k in ((k1, 1), (p3, 2), (square_grid(4), 2)):
        emb = pendant_power_embedding(base, k)
        assert emb.exponent == k + 2
        assert len(set(emb.mapping)) == emb.guest.n
        host_dist = all_pairs_distances(emb.host).matrix
        for u, v in emb.guest.edges:
            assert host_dist[emb.mapping[u], emb.mapping[v]] <= emb.exponent

    # unions
    assert disjoint_union([]).n == 0
    assert disjoint_union([k1, k1]).n == 2 and disjoint_union([k1, k1]).num_edges == 0
    rng = np.random.default_rng(1)
    for _ in range(10):
        parts = [
            Graph(int(rng.integers(1, 20)), [])
            for _ in range(int(rng.integers(1, 4)))
        ]
        parts = [
            Graph(g.n, random_graph(rng, g.n, 0.3)) for g in parts
        ]
        assert disjoint_union(parts).num_edges == sum(g.num_edges for g in parts)

    # planarity witnesses
    assert planarity_check(k4).is_planar
    assert planarity_check(k5).witness_kind == "K5"
    assert planarity_check(k33).witness_kind == "K33"

    # subset diameters
    assert subset_diameter(triangle, [1]) == 0
    assert subset_diameter(p3, [0, 1]) == 1
    assert subset_diameter(triangle, [0, 1, 2]) == 1
