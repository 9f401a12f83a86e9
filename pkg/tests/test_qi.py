"""Distortion measurement, degree pruning, blow-up embedding, cover pullback."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsegraph import (
    Graph,
    GraphError,
    QIMap,
    blowup,
    check_cover,
    cover_pullback,
    embed_power_blowup,
    measure_distortion,
    prune_to_bounded_degree,
    qimap_from_json,
    subdivide,
)
from coarsegraph.dimension import Cover
from coarsegraph.sources import ball, grid2, square_grid

from .oracles import floyd_warshall, random_graph


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def identity(g):
    return QIMap(g, g, tuple(range(g.n)))


def round_to_even_window():
    """The radius-8 grid window mapped onto itself by rounding each
    coordinate to the nearest even value toward zero."""
    w = ball(grid2(), 8)
    g = w.graph
    coords = {
        v: tuple(int(t) for t in g.labels[v].strip("()").split(","))
        for v in range(g.n)
    }
    by_key = {c: v for v, c in coords.items()}
    even = lambda t: (abs(t) // 2 * 2) * (1 if t >= 0 else -1)
    mapping = tuple(by_key[(even(x), even(y))] for _, (x, y) in sorted(coords.items()))
    return QIMap(g, g, mapping)


# ---------------------------------------------------------------------------
# measure_distortion

def test_identity_has_unit_constants():
    rep = measure_distortion(identity(square_grid(4)))
    assert rep.lower_scale == 1 and rep.upper_scale == 1
    assert rep.surjectivity_radius == 0
    assert rep.additive_eps(1) == 0
    assert rep.is_quasi_isometry(1, 0, density=0)


def test_subdivision_inclusion_doubles_the_metric():
    g = square_grid(3)
    f = QIMap(g, subdivide(g, 1), tuple(range(g.n)))
    rep = measure_distortion(f)
    assert rep.lower_scale == 2 and rep.upper_scale == 2
    assert rep.surjectivity_radius == 1


def test_round_to_even_window_constants():
    # Frozen by an exhaustive scan: collapsing (1,1) and (-1,-1) onto the
    # origin costs 4 additively; no 1-Lipschitz rounding onto evens exists.
    rep = measure_distortion(round_to_even_window())
    assert rep.lower_scale == 0
    assert rep.upper_scale == 2
    assert rep.additive_eps(1) == 4
    assert rep.surjectivity_radius == 2
    assert not rep.is_quasi_isometry(1, 2)
    assert rep.is_quasi_isometry(1, 4, density=2)


def test_round_to_even_against_brute_force():
    f = round_to_even_window()
    n = f.domain.n
    d = floyd_warshall(n, f.domain.edges)
    ratios = [
        Fraction(int(d[f(u), f(v)]), int(d[u, v]))
        for u in range(n)
        for v in range(u + 1, n)
    ]
    rep = measure_distortion(f)
    assert rep.lower_scale == min(ratios)
    assert rep.upper_scale == max(ratios)


def test_witnesses_reproduce_the_reported_values():
    f = round_to_even_window()
    rep = measure_distortion(f)
    d = floyd_warshall(f.domain.n, f.domain.edges)
    for witness, value in ((rep.lower_witness, rep.lower_scale),
                           (rep.upper_witness, rep.upper_scale)):
        u, v = witness
        assert Fraction(int(d[f(u), f(v)]), int(d[u, v])) == value
    far = rep.farthest_vertex
    img = set(f.image())
    assert min(int(d[far, y]) for y in img) == rep.surjectivity_radius


def test_empty_domain_rejected():
    with pytest.raises(GraphError):
        measure_distortion(QIMap(Graph(0, []), path(2), ()))


def test_map_must_be_total_and_in_range():
    with pytest.raises(GraphError):
        QIMap(path(3), path(2), (0, 1))
    with pytest.raises(GraphError):
        QIMap(path(3), path(2), (0, 1, 2))


def test_qimap_json_round_trip():
    f = QIMap(path(3), path(5), (0, 2, 4))
    back = qimap_from_json(path(3), path(5), f.to_json())
    assert back.mapping == f.mapping
    with pytest.raises(GraphError):
        qimap_from_json(path(3), path(5), {"map": [[0, 0], [1, 1]]})


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_reported_scales_are_sound_and_tight(seed, n):
    rng = np.random.default_rng(seed)
    edges = random_graph(rng, n, 0.5)
    g = Graph(n, edges)
    f = QIMap(g, g, tuple(int(x) for x in rng.integers(0, n, size=n)))
    rep = measure_distortion(f)
    d = floyd_warshall(n, edges)
    if not any(
        np.isfinite(d[u, v]) and np.isfinite(d[f(u), f(v)])
        for u in range(n) for v in range(u + 1, n)
    ):
        assert rep.lower_witness is None and rep.upper_witness is None
        return
    hit_low = hit_high = False
    for u in range(n):
        for v in range(u + 1, n):
            if not (np.isfinite(d[u, v]) and np.isfinite(d[f(u), f(v)])):
                continue
            ratio = Fraction(int(d[f(u), f(v)]), int(d[u, v]))
            assert rep.lower_scale <= ratio <= rep.upper_scale
            hit_low = hit_low or ratio == rep.lower_scale
            hit_high = hit_high or ratio == rep.upper_scale
    assert hit_low and hit_high


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_distortion_is_isomorphism_invariant(seed):
    rng = np.random.default_rng(seed)
    n = 10
    g = Graph(n, random_graph(rng, n, 0.4))
    f = QIMap(g, g, tuple(int(x) for x in rng.integers(0, n, size=n)))
    perm = [int(x) for x in rng.permutation(n)]
    relabeled = Graph(n, [(perm[u], perm[v]) for u, v in g.edges])
    f2 = QIMap(
        relabeled,
        relabeled,
        tuple(perm[f(x)] for x in np.argsort(perm)),
    )
    a, b = measure_distortion(f), measure_distortion(f2)
    assert (a.lower_scale, a.upper_scale, a.surjectivity_radius) == (
        b.lower_scale, b.upper_scale, b.surjectivity_radius)


# ---------------------------------------------------------------------------
# prune_to_bounded_degree

def test_prune_identity_is_the_whole_graph():
    g = square_grid(3)
    res = prune_to_bounded_degree(identity(g), 1)
    assert res.subgraph == g
    assert res.kept == tuple(range(g.n))
    assert res.report.ok
    assert res.uncovered_codomain == ()


def test_prune_drops_an_avoidable_apex():
    n = 10
    edges = [(i, i + 1) for i in range(n - 1)] + [(i, n) for i in range(n)]
    host = Graph(n + 1, edges)
    f = QIMap(path(n), host, tuple(range(n)))
    res = prune_to_bounded_degree(f, 2)
    # Consecutive images are adjacent, so canonical shortest paths are the
    # path edges themselves and the apex is never kept.
    assert n not in res.kept
    assert res.subgraph == path(n)
    assert res.report.ok, res.report.failed()
    assert res.uncovered_codomain == ()  # apex sits at distance 1 <= A


def test_prune_bounds_hold_on_planted_instances():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        g = square_grid(3)
        host = subdivide(g, 1)
        f = QIMap(g, host, tuple(range(g.n)))
        res = prune_to_bounded_degree(f, 2)
        assert res.report.ok, res.report.failed()
        assert res.subgraph.max_degree() <= g.max_degree() ** (2 * 4)
        dd = floyd_warshall(g.n, g.edges)
        sd = floyd_warshall(res.subgraph.n, res.subgraph.edges)
        rm = res.restricted.mapping
        for u in range(g.n):
            for v in range(g.n):
                assert sd[rm[u], rm[v]] <= 4 * dd[u, v]


def test_prune_hypothesis_violation_names_the_edge():
    f = QIMap(path(2), path(10), (0, 9))
    with pytest.raises(GraphError, match="edge 0-1"):
        prune_to_bounded_degree(f, 1)


def test_prune_rejects_bad_rate():
    with pytest.raises(GraphError):
        prune_to_bounded_degree(identity(path(3)), 0)


def test_prune_flags_far_codomain_vertices():
    # Image covers only one end of a long path: the far end is uncovered.
    f = QIMap(path(2), path(10), (0, 1))
    res = prune_to_bounded_degree(f, 1)
    assert res.uncovered_codomain == (3, 4, 5, 6, 7, 8, 9)


# ---------------------------------------------------------------------------
# embed_power_blowup

def test_embed_identity_is_trivial():
    g = square_grid(3)
    emb = embed_power_blowup(identity(g), 1)
    assert emb.fiber_cap == 1
    assert emb.host.n == g.n
    assert emb.assignment == tuple(range(g.n))
    assert emb.report.ok
    assert emb.window == 2


def test_embed_blowup_projection():
    g = blowup(path(3), 2)
    f = QIMap(g, path(3), tuple(v // 2 for v in range(g.n)))
    emb = embed_power_blowup(f, 2)
    assert emb.fiber_cap == 2
    assert emb.report.ok, emb.report.failed()
    assert len(set(emb.assignment)) == g.n
    for u, v in g.edges:
        assert emb.host.has_edge(emb.assignment[u], emb.assignment[v])


def test_embed_reports_when_the_apriori_cap_fails():
    k4 = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    f = QIMap(k4, Graph(1, []), (0, 0, 0, 0))
    emb = embed_power_blowup(f, 1)
    assert emb.fiber_cap == 4
    assert emb.paper_cap == 3
    assert not emb.cap_within_paper_bound
    assert emb.report.ok  # embedding itself is still valid


def test_embed_hypothesis_violation_raises():
    f = QIMap(path(5), Graph(1, []), (0,) * 5)
    with pytest.raises(GraphError, match="distance hypothesis"):
        embed_power_blowup(f, 1)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_embed_planted_instances_verify(seed):
    rng = np.random.default_rng(seed)
    base = square_grid(3)
    g = blowup(base, int(rng.integers(1, 3)))
    k = g.n // base.n
    f = QIMap(g, base, tuple(v // k for v in range(g.n)))
    emb = embed_power_blowup(f, 2)
    assert emb.report.ok
    assert emb.fiber_cap == k


# ---------------------------------------------------------------------------
# cover_pullback

def grid_cover(n):
    # Alternating rows split into two families so each family is 2-separated.
    g = square_grid(n)
    rows = [tuple(range(i * n, (i + 1) * n)) for i in range(n)]
    return g, Cover(
        r=1,
        claimed_D=n - 1,
        families=(tuple(rows[0::2]), tuple(rows[1::2])),
    )


def test_pullback_through_identity_is_unchanged():
    g = path(6)
    cover = Cover(r=1, claimed_D=2, families=(((0, 1, 2),), ((3, 4, 5),)))
    assert check_cover(g, cover).ok
    pulled, rep = cover_pullback(cover, identity(g))
    assert pulled.families == cover.families
    assert pulled.r == cover.r and pulled.claimed_D == cover.claimed_D
    assert rep.ok


def test_pullback_through_subdivision_halves_the_numbers():
    g = path(4)
    h = subdivide(g, 1)  # originals keep ids, metric doubles
    f = QIMap(g, h, tuple(range(g.n)))
    mids = tuple(range(g.n, h.n))
    cover = Cover(
        r=2,
        claimed_D=6,
        families=((tuple(range(g.n)) + mids,),),
    )
    assert check_cover(h, cover).ok
    pulled, rep = cover_pullback(cover, f)
    assert pulled.r == 1  # floor(2 / c2) with c2 = 2
    assert pulled.claimed_D == 3  # floor(6 / c1) with c1 = 2
    assert pulled.families == (((0, 1, 2, 3),),)
    assert rep.ok


def test_pullback_through_an_isomorphism_keeps_the_certificate():
    g, cover = grid_cover(3)
    perm = [2, 0, 1, 5, 3, 4, 8, 6, 7]
    relabeled = Graph(g.n, [(perm[u], perm[v]) for u, v in g.edges])
    inv = np.argsort(perm)
    f = QIMap(g, relabeled, tuple(perm))
    iso_cover = Cover(
        r=cover.r,
        claimed_D=cover.claimed_D,
        families=tuple(
            tuple(tuple(perm[v] for v in c) for c in fam) for fam in cover.families
        ),
    )
    assert check_cover(relabeled, iso_cover).ok
    pulled, rep = cover_pullback(iso_cover, f)
    assert pulled.families == cover.families
    assert pulled.r == cover.r and pulled.claimed_D == cover.claimed_D
    assert rep.ok


def test_pullback_requires_positive_lower_scale():
    f = round_to_even_window()  # lower scale 0
    cover = Cover(r=1, claimed_D=99, families=((tuple(range(f.codomain.n)),),))
    with pytest.raises(GraphError, match="bilipschitz"):
        cover_pullback(cover, f)
