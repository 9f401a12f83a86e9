"""Measuring maps between graphs and upgrading them to clean embeddings.

``measure_distortion`` reports exact multiplicative and additive distortion
of a vertex map.  ``prune_to_bounded_degree`` shrinks the codomain to a
union of canonical shortest paths, giving degree control.
``embed_power_blowup`` turns an approximate-isometry into an injective
homomorphism into a blown-up power graph.  ``cover_pullback`` transports a
certified cover backwards through a bilipschitz map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import (
    DistanceOracle,
    Graph,
    GraphError,
    blowup,
    is_connected,
    multi_source_distances,
    power,
)
from .treedec import Clause, ValidationReport


@dataclass(frozen=True)
class QIMap:
    """A total vertex map between two graphs."""

    domain: Graph
    codomain: Graph
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        if len(mapping) != self.domain.n:
            raise GraphError("map must assign every domain vertex")
        if self.domain.n and not all(0 <= y < self.codomain.n for y in mapping):
            raise GraphError("map image out of codomain range")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.mapping)))

    def to_json(self) -> dict:
        return {"map": [[x, y] for x, y in enumerate(self.mapping)]}


def qimap_from_json(domain: Graph, codomain: Graph, obj: dict) -> QIMap:
    pairs = obj["map"]
    mapping = [-1] * domain.n
    for x, y in pairs:
        if not 0 <= x < domain.n:
            raise GraphError(f"map key {x} out of domain range")
        mapping[x] = int(y)
    if any(y < 0 for y in mapping):
        raise GraphError("map must assign every domain vertex")
    return QIMap(domain, codomain, tuple(mapping))


ProfileEntry = tuple[int, int, tuple[int, int]]


@dataclass(frozen=True)
class DistortionReport:
    """Exact distortion data for one map.

    ``lower_scale``/``upper_scale`` are the extreme ratios of image distance
    to domain distance over all distinct finite pairs.  The profiles store,
    for each observed distance on one side, the worst partner on the other
    side, so additive slack at any rate can be answered exactly afterwards.
    """

    lower_scale: Fraction
    upper_scale: Fraction
    surjectivity_radius: int | float
    lower_witness: tuple[int, int] | None
    upper_witness: tuple[int, int] | None
    farthest_vertex: int | None
    contraction_profile: tuple[ProfileEntry, ...] = field(repr=False, default=())
    expansion_profile: tuple[ProfileEntry, ...] = field(repr=False, default=())

    def additive_eps(self, rate) -> Fraction:
        """Smallest eps with domain_distance/rate - eps <= image_distance."""
        rate = Fraction(rate)
        if rate <= 0:
            raise GraphError("rate must be positive")
        best = Fraction(0)
        for image_d, domain_d, _ in self.contraction_profile:
            best = max(best, Fraction(domain_d) / rate - image_d)
        return best

    def upper_additive_eps(self, rate) -> Fraction:
        """Smallest eps with image_distance <= rate * domain_distance + eps."""
        rate = Fraction(rate)
        best = Fraction(0)
        for domain_d, image_d, _ in self.expansion_profile:
            best = max(best, Fraction(image_d) - rate * domain_d)
        return best

    def is_quasi_isometry(self, rate, eps, density=None) -> bool:
        if self.additive_eps(rate) > eps or self.upper_additive_eps(rate) > eps:
            return False
        if density is not None and self.surjectivity_radius > density:
            return False
        return True

    def to_json(self) -> dict:
        def frac(x: Fraction):
            return {"value": float(x), "fraction": [x.numerator, x.denominator]}

        return {
            "lower_scale": frac(self.lower_scale),
            "upper_scale": frac(self.upper_scale),
            "surjectivity_radius": (
                self.surjectivity_radius
                if math.isfinite(self.surjectivity_radius)
                else "unreachable"
            ),
            "lower_witness": list(self.lower_witness) if self.lower_witness else None,
            "upper_witness": list(self.upper_witness) if self.upper_witness else None,
            "farthest_vertex": self.farthest_vertex,
        }


def _profile(side: np.ndarray, other: np.ndarray, pairs) -> tuple[ProfileEntry, ...]:
    """For each distinct value of ``side``, the max of ``other`` and a witness."""
    order = np.lexsort((-other, side))
    keys, first = np.unique(side[order], return_index=True)
    out = []
    for key, pos in zip(keys, first):
        k = order[pos]
        out.append((int(key), int(other[k]), (int(pairs[0][k]), int(pairs[1][k]))))
    return tuple(out)


def _extreme_ratio(num, den, pairs, want_max: bool):
    """Exact extreme of num/den over all pair indices, float-prefiltered."""
    ratios = num / den
    target = ratios.max() if want_max else ratios.min()
    slack = 1e-9 * max(1.0, abs(target))
    cand = np.where(ratios >= target - slack)[0] if want_max else np.where(ratios <= target + slack)[0]
    best = None
    witness = None
    for k in cand:
        value = Fraction(int(num[k]), int(den[k]))
        pair = (int(pairs[0][k]), int(pairs[1][k]))
        if (
            best is None
            or (want_max and value > best)
            or (not want_max and value < best)
            or (value == best and pair < witness)
        ):
            best, witness = value, pair
    return best, witness


def measure_distortion(f: QIMap) -> DistortionReport:
    """Exact scan over all finite vertex pairs."""
    n = f.domain.n
    if n == 0:
        raise GraphError("empty domain")
    dist_dom = DistanceOracle(f.domain).matrix
    dist_cod = DistanceOracle(f.codomain).matrix
    fm = np.asarray(f.mapping, dtype=np.int64)
    through = dist_cod[np.ix_(fm, fm)]

    iu, ju = np.triu_indices(n, 1)
    a = dist_dom[iu, ju]
    b = through[iu, ju]
    finite = np.isfinite(a) & np.isfinite(b)
    iu, ju, a, b = iu[finite], ju[finite], a[finite], b[finite]

    reach = multi_source_distances(f.codomain, f.image())
    if np.all(np.isfinite(reach)):
        far = int(np.argmax(reach))
        surj = int(reach[far])
    else:
        far = int(np.argmax(~np.isfinite(reach)))
        surj = math.inf

    if a.size == 0:
        return DistortionReport(
            lower_scale=Fraction(0),
            upper_scale=Fraction(0),
            surjectivity_radius=surj,
            lower_witness=None,
            upper_witness=None,
            farthest_vertex=far,
        )

    lower, lower_wit = _extreme_ratio(b, a, (iu, ju), want_max=False)
    upper, upper_wit = _extreme_ratio(b, a, (iu, ju), want_max=True)
    ai = a.astype(np.int64)
    bi = b.astype(np.int64)
    return DistortionReport(
        lower_scale=lower,
        upper_scale=upper,
        surjectivity_radius=surj,
        lower_witness=lower_wit,
        upper_witness=upper_wit,
        farthest_vertex=far,
        contraction_profile=_profile(bi, ai, (iu, ju)),
        expansion_profile=_profile(ai, bi, (iu, ju)),
    )


# ---------------------------------------------------------------------------
# Degree pruning

def _lex_min_shortest_path(H: Graph, dist_to_target: np.ndarray, a: int, b: int) -> tuple[int, ...]:
    """Walk from a to b always taking the smallest neighbor that stays on a
    shortest path.  Deterministic among all shortest a-b paths."""
    path = [a]
    cur = a
    while cur != b:
        here = dist_to_target[cur]
        step = -1
        for v in H.neighbors(cur):
            if dist_to_target[v] == here - 1:
                step = int(v)
                break
        if step < 0:
            raise GraphError("inconsistent distance table")
        path.append(step)
        cur = step
    return tuple(path)


@dataclass(frozen=True)
class PruneResult:
    """Codomain shrunk to a union of canonical shortest paths.

    ``kept[i]`` is the original codomain vertex behind dense vertex i of
    ``subgraph``; ``restricted`` maps the domain into the dense ids.
    ``uncovered_codomain`` lists original codomain vertices farther than
    the rate A from the image in the *original* codomain, i.e. where the
    density assumption behind the pruning breaks (flagged, not an error:
    finite windows legitimately have uncovered fringe).
    """

    subgraph: Graph
    kept: tuple[int, ...]
    restricted: QIMap
    paths: dict[tuple[int, int], tuple[int, ...]]
    span: int
    report: ValidationReport
    uncovered_codomain: tuple[int, ...]


def prune_to_bounded_degree(f: QIMap, A: int) -> PruneResult:
    """Keep one canonical shortest path per domain edge; verify the result.

    The span bound is A*A: every domain edge must map to codomain vertices
    at distance at most A*A (error if violated), every kept vertex ends up
    within A*A of the image, the pruned degree stays at or below
    max_degree(domain) ** (2*A*A), and pruned image distances stay at or
    below A*A times the domain distance for all pairs.
    """
    if A < 1:
        raise GraphError("A must be a positive integer")
    if f.domain.n == 0:
        raise GraphError("empty domain")
    span = A * A
    H = f.codomain
    oracle = DistanceOracle(H)
    raw = oracle.matrix

    for u, v in f.domain.edges:
        d = raw[f(u), f(v)]
        if not np.isfinite(d) or d > span:
            raise GraphError(
                f"edge {u}-{v} maps {f(u)}->{f(v)} at distance {d}, beyond {span}"
            )

    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    keep: set[int] = {f(x) for x in range(f.domain.n)}
    kept_edges: set[tuple[int, int]] = set()
    dist_rows: dict[int, np.ndarray] = {}
    for u, v in f.domain.edges:
        a, b = f(u), f(v)
        lo, hi = (a, b) if a <= b else (b, a)
        if lo not in dist_rows:
            dist_rows[lo] = raw[:, lo]
        path = _lex_min_shortest_path(H, dist_rows[lo], hi, lo)
        paths[(u, v)] = path
        keep.update(path)
        for x, y in zip(path, path[1:]):
            kept_edges.add((min(x, y), max(x, y)))

    kept = tuple(sorted(keep))
    rank = {h: i for i, h in enumerate(kept)}
    sub = Graph(
        len(kept),
        sorted((rank[x], rank[y]) for x, y in kept_edges),
        {rank[h]: H.labels.get(h, str(h)) for h in kept},
    )
    restricted = QIMap(f.domain, sub, tuple(rank[f(x)] for x in range(f.domain.n)))

    report = ValidationReport()
    too_long = [
        (e, len(p) - 1) for e, p in paths.items() if len(p) - 1 > span
    ]
    report.clauses.append(
        Clause(
            "path_span",
            not too_long,
            None if not too_long else f"edge {too_long[0][0]} path length {too_long[0][1]}",
        )
    )

    degree_cap = max(f.domain.max_degree(), 1) ** (2 * span)
    worst = sub.max_degree()
    report.clauses.append(
        Clause(
            "degree_cap",
            worst <= degree_cap,
            None if worst <= degree_cap else f"pruned degree {worst} > {degree_cap}",
        )
    )

    image_dense = sorted({rank[f(x)] for x in range(f.domain.n)})
    near = multi_source_distances(sub, image_dense)
    ok = bool(np.all(np.isfinite(near)) and np.max(near) <= span)
    report.clauses.append(
        Clause(
            "image_dense",
            ok,
            None if ok else f"kept vertex {int(np.argmax(near))} sits {np.max(near)} away",
        )
    )

    sub_dist = DistanceOracle(sub).matrix
    dom_dist = DistanceOracle(f.domain).matrix
    fm = np.asarray(restricted.mapping, dtype=np.int64)
    through = sub_dist[np.ix_(fm, fm)]
    finite = np.isfinite(dom_dist)
    stretched = through[finite] > span * dom_dist[finite]
    ok = not bool(np.any(stretched))
    witness = None
    if not ok:
        bad = np.argwhere(finite)[np.nonzero(stretched)[0][0]]
        witness = f"pair {tuple(int(t) for t in bad)} stretched beyond {span}x"
    report.clauses.append(Clause("pair_stretch", ok, witness))

    reach_h = multi_source_distances(H, f.image())
    uncovered = tuple(
        int(z) for z in range(H.n) if not (reach_h[z] <= A)
    )
    return PruneResult(
        subgraph=sub,
        kept=kept,
        restricted=restricted,
        paths=paths,
        span=span,
        report=report,
        uncovered_codomain=uncovered,
    )


# ---------------------------------------------------------------------------
# Power blow-up embedding

@dataclass(frozen=True)
class PowerBlowupEmbedding:
    """Injective homomorphism of the domain into blowup(power(codomain, 2A), B).

    ``fiber_cap`` is the measured largest preimage; ``paper_cap`` the
    a-priori bound max_degree(domain) ** (A*A).  The construction uses the
    measured value; ``cap_within_paper_bound`` records whether the a-priori
    bound held.  ``window`` = max(2A, fiber_cap) is the exponent scale the
    downstream pendant trick consumes.
    """

    guest: Graph
    host: Graph
    assignment: tuple[int, ...]
    rate: int
    fiber_cap: int
    paper_cap: int
    cap_within_paper_bound: bool
    window: int
    report: ValidationReport

    def to_json(self) -> dict:
        return {
            "assignment": list(self.assignment),
            "rate": self.rate,
            "fiber_cap": self.fiber_cap,
            "paper_cap": self.paper_cap,
            "cap_within_paper_bound": self.cap_within_paper_bound,
            "window": self.window,
            "report": self.report.to_json(),
        }


def embed_power_blowup(f: QIMap, A: int) -> PowerBlowupEmbedding:
    """Embed the domain into a power of the codomain blown up by fiber size.

    Requires the two-sided additive hypothesis
    domain_distance/A - A <= image_distance <= A*domain_distance + A
    on every finite pair (error with witness otherwise).
    """
    if A < 1:
        raise GraphError("A must be a positive integer")
    if f.domain.n == 0:
        raise GraphError("empty domain")
    rate = A
    dom = DistanceOracle(f.domain).matrix
    cod = DistanceOracle(f.codomain).matrix
    fm = np.asarray(f.mapping, dtype=np.int64)
    through = cod[np.ix_(fm, fm)]
    finite = np.isfinite(dom)
    lower_bad = (dom[finite] / rate - rate) > through[finite]
    upper_bad = through[finite] > (rate * dom[finite] + rate)
    if np.any(lower_bad) or np.any(upper_bad):
        which = lower_bad if np.any(lower_bad) else upper_bad
        bad = np.argwhere(finite)[np.nonzero(which)[0][0]]
        x, y = (int(t) for t in bad)
        raise GraphError(
            f"pair ({x},{y}) violates the distance hypothesis at rate {rate}: "
            f"domain {dom[x, y]}, image {through[x, y]}"
        )

    fibers: dict[int, list[int]] = {}
    for x in range(f.domain.n):
        fibers.setdefault(f(x), []).append(x)
    fiber_cap = max(len(v) for v in fibers.values())
    paper_cap = max(f.domain.max_degree(), 1) ** (rate * rate)

    host = blowup(power(f.codomain, 2 * rate), fiber_cap)
    assignment = [0] * f.domain.n
    for y, members in fibers.items():
        for i, x in enumerate(sorted(members)):
            assignment[x] = y * fiber_cap + i
    assignment = tuple(assignment)

    report = ValidationReport()
    injective = len(set(assignment)) == f.domain.n
    report.clauses.append(
        Clause("injective", injective, None if injective else "assignment collides")
    )
    bad_edge = None
    for u, v in f.domain.edges:
        if not host.has_edge(assignment[u], assignment[v]):
            bad_edge = (u, v)
            break
    report.clauses.append(
        Clause(
            "edge_preserving",
            bad_edge is None,
            None if bad_edge is None else f"edge {bad_edge} not preserved",
        )
    )

    return PowerBlowupEmbedding(
        guest=f.domain,
        host=host,
        assignment=assignment,
        rate=rate,
        fiber_cap=fiber_cap,
        paper_cap=paper_cap,
        cap_within_paper_bound=fiber_cap <= paper_cap,
        window=max(2 * rate, fiber_cap),
        report=report,
    )


# ---------------------------------------------------------------------------
# Cover pullback

def cover_pullback(cover, f: QIMap, report: DistortionReport | None = None):
    """Transport a cover of the codomain back through a bilipschitz map.

    Clusters become preimages (empties dropped), the scale shrinks by the
    upper ratio, the bound by the lower ratio; the result is re-certified by
    the cover checker, never assumed.  Returns (cover, checker report).
    """
    from .dimension import Cover, check_cover

    if report is None:
        report = measure_distortion(f)
    if report.lower_scale <= 0:
        raise GraphError("map is not bilipschitz: lower scale is zero")
    c1, c2 = report.lower_scale, report.upper_scale

    new_r = math.floor(Fraction(cover.r) / c2) if c2 > 0 else cover.r
    new_bound = math.floor(Fraction(cover.claimed_D) / c1)
    families = []
    for family in cover.families:
        pulled = []
        for cluster in family:
            members = set(cluster)
            pre = tuple(x for x in range(f.domain.n) if f(x) in members)
            if pre:
                pulled.append(pre)
        families.append(tuple(pulled))
    pulled_cover = Cover(r=new_r, claimed_D=new_bound, families=tuple(families))
    checked = check_cover(f.domain, pulled_cover)
    if not checked.ok:
        raise GraphError(
            "pulled-back cover failed certification: " + ", ".join(checked.failed())
        )
    return pulled_cover, checked
