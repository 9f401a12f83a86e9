"""Sparse covers at scale r: constructions and the checker that certifies them.

A cover groups vertices into clusters arranged in families; within a family
distinct clusters must sit at graph distance strictly greater than r, and
every cluster must have diameter at most the claimed bound.  ``check_cover``
verifies all of it with exact BFS distances and is the single oracle every
constructor in this module answers to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graphs import Graph, GraphError, UNREACHABLE, multi_source_distances
from .treedec import Clause, ValidationReport


@dataclass(frozen=True)
class Cover:
    """Families of clusters at scale ``r`` with claimed diameter bound."""

    r: int
    claimed_D: int
    families: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        fams = tuple(
            tuple(tuple(sorted(int(v) for v in cluster)) for cluster in family)
            for family in self.families
        )
        object.__setattr__(self, "families", fams)

    @property
    def family_count(self) -> int:
        return len(self.families)

    def cluster_count(self) -> int:
        return sum(len(f) for f in self.families)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "claimed_D": self.claimed_D,
            "families": [[list(c) for c in fam] for fam in self.families],
        }


def cover_from_json(obj: dict) -> Cover:
    return Cover(
        r=int(obj["r"]),
        claimed_D=int(obj["claimed_D"]),
        families=tuple(
            tuple(tuple(c) for c in fam) for fam in obj["families"]
        ),
    )


@dataclass
class CoverReport(ValidationReport):
    """Checker outcome plus the exact measurements behind it."""

    measured_bound: int | float = 0
    family_count: int = 0

    def to_json(self) -> dict:
        base = super().to_json()
        base["measured_D"] = (
            "unbounded" if self.measured_bound == UNREACHABLE else self.measured_bound
        )
        base["families"] = self.family_count
        return base


def check_cover(G: Graph, cover: Cover) -> CoverReport:
    """Certify covering, strict per-family separation, and boundedness."""
    report = CoverReport(family_count=cover.family_count)

    ok, witness = True, None
    for i, family in enumerate(cover.families):
        for j, cluster in enumerate(family):
            if not cluster:
                ok, witness = False, f"family {i} cluster {j} is empty"
                break
            if cluster[0] < 0 or cluster[-1] >= G.n:
                ok, witness = False, f"family {i} cluster {j} out of range"
                break
        if not ok:
            break
    report.clauses.append(Clause("clusters_nonempty", ok, witness))
    if not ok:
        return report

    seen = np.zeros(G.n, dtype=bool)
    for family in cover.families:
        for cluster in family:
            seen[list(cluster)] = True
    ok = bool(seen.all())
    witness = None if ok else f"vertex {int(np.argmin(seen))} uncovered"
    report.clauses.append(Clause("covering", ok, witness))

    ok, witness = True, None
    for i, family in enumerate(cover.families):
        if len(family) < 2:
            continue
        owner = np.full(G.n, -1, dtype=np.int32)
        for j, cluster in enumerate(family):
            members = np.asarray(cluster, dtype=np.int64)
            clash = owner[members] >= 0
            if clash.any():
                v = int(members[clash][0])
                ok = False
                witness = f"family {i}: vertex {v} lies in clusters {int(owner[v])} and {j}"
                break
            owner[members] = j
        if not ok:
            break
        d, u, v = kernels.voronoi_min_separation(G._indptr, G._indices, owner)
        if 0 <= d <= cover.r:
            ok = False
            witness = (
                f"family {i}: clusters near {int(u)} and {int(v)} "
                f"sit {int(d)} apart, need > {cover.r}"
            )
            break
    report.clauses.append(Clause("family_separation", ok, witness))

    # Measure every cluster (the measured bound is part of the report),
    # recording the first violation instead of exiting early.
    measured: int | float = 0
    ok, witness = True, None
    for i, family in enumerate(cover.families):
        for j, cluster in enumerate(family):
            members = np.asarray(cluster, dtype=np.int32)
            diam = kernels.set_diameter(G._indptr, G._indices, members)
            if diam == -2:
                measured = UNREACHABLE
                ok = False
                witness = f"family {i} cluster {j} spans unreachable vertices"
                break
            if diam > measured:
                measured = int(diam)
            if ok and diam > cover.claimed_D:
                ok = False
                witness = (
                    f"family {i} cluster {j} has diameter {int(diam)} "
                    f"> claimed {cover.claimed_D}"
                )
        if measured == UNREACHABLE:
            break
    report.measured_bound = measured
    report.clauses.append(Clause("bounded", ok, witness))
    return report


# ---------------------------------------------------------------------------
# Layerings

@dataclass(frozen=True)
class Layering:
    """Per-vertex layer indices (exact distances to the root set)."""

    layers: tuple[int, ...]
    roots: tuple[int, ...]

    def blocks(self, length: int) -> dict[int, list[int]]:
        """Vertices grouped by layer // length, keyed by block index."""
        out: dict[int, list[int]] = {}
        for v, layer in enumerate(self.layers):
            out.setdefault(layer // length, []).append(v)
        return out


def bfs_layering(G: Graph, roots=None) -> Layering:
    """Layers = exact distance to the root set; roots default to the
    smallest vertex of every connected component."""
    if G.n == 0:
        raise GraphError("empty graph")
    if roots is None:
        from .graphs import connected_components

        roots = [min(comp) for comp in connected_components(G)]
    roots = sorted(set(int(x) for x in roots))
    dist = multi_source_distances(G, roots)
    if not np.all(np.isfinite(dist)):
        raise GraphError("roots must meet every connected component")
    layers = tuple(int(d) for d in dist)
    for u, v in G.edges:
        if abs(layers[u] - layers[v]) > 1:
            raise GraphError(f"edge {u}-{v} jumps layers")  # unreachable for BFS
    return Layering(layers=layers, roots=tuple(roots))


# ---------------------------------------------------------------------------
# Tree cover: depth bands split at half-band anchors

def _lift_table(parent: np.ndarray, max_depth: int) -> list[np.ndarray]:
    bits = max(1, int(max_depth).bit_length())
    table = [parent]
    for _ in range(1, bits):
        prev = table[-1]
        table.append(prev[prev])
    return table


def _ancestors_at(
    table: list[np.ndarray], vertices: np.ndarray, steps: np.ndarray
) -> np.ndarray:
    out = vertices.copy()
    hop = steps.copy()
    for bit, jump in enumerate(table):
        mask = (hop >> bit) & 1 == 1
        if mask.any():
            out[mask] = jump[out[mask]]
    return out


def tree_band_cover(T: Graph, root: int, r: int) -> Cover:
    """Two-family cover of a tree by depth bands of height 2r.

    Band j holds depths [2rj, 2r(j+1)); its vertices are split into
    clusters by their ancestor at depth 2rj - r (one half-band above), the
    whole band forming one cluster when j = 0.  Families alternate with
    band parity.  Claimed bound 6r: within a cluster any two vertices meet
    at or below the shared anchor, at most 3r - 1 steps up each.
    """
    if r < 1:
        raise GraphError("scale r must be >= 1")
    if T.num_edges != T.n - 1:
        raise GraphError("input graph is not a tree")
    if not 0 <= root < T.n:
        raise GraphError("root out of range")
    src = np.asarray([root], dtype=np.int32)
    blocked = np.zeros(T.n, dtype=np.uint8)
    depth_raw, parent = kernels.masked_bfs_tree(T._indptr, T._indices, src, blocked)
    if np.any(depth_raw < 0):
        raise GraphError("input graph is not a tree")  # disconnected
    depth = depth_raw.astype(np.int64)
    parent = parent.astype(np.int64)
    parent[root] = root

    band = depth // (2 * r)
    anchor = np.full(T.n, root, dtype=np.int64)
    deep = band >= 1
    if deep.any():
        target = 2 * r * band[deep] - r
        steps = depth[deep] - target
        table = _lift_table(parent, int(steps.max()))
        anchor[deep] = _ancestors_at(table, np.arange(T.n, dtype=np.int64)[deep], steps)

    key = band * T.n + anchor
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    boundaries = np.nonzero(np.diff(sorted_key))[0] + 1
    groups = np.split(order, boundaries)

    families: list[list[tuple[int, ...]]] = [[], []]
    for group in groups:
        members = tuple(int(v) for v in np.sort(group))
        j = int(band[group[0]])
        lo, hi = depth[group].min(), depth[group].max()
        if not (2 * r * j <= lo and hi <= 2 * r * (j + 1) - 1):
            raise GraphError("band bookkeeping broke")  # construction guarantee
        families[j % 2].append(members)
    fams = tuple(tuple(f) for f in families if f)
    return Cover(r=r, claimed_D=6 * r, families=fams)


# ---------------------------------------------------------------------------
# Grid cover: shifted 2r x 2r blocks on the 3r lattice

def grid_shift_cover(n: int, r: int) -> Cover:
    """Three-family cover of the n-by-n grid (vertex ids x*n + y).

    Family i keeps points whose coordinates, shifted by i*r, land in the
    first 2r residues mod 3r (in both axes), grouped into blocks by the
    shifted 3r-cell.  Per axis each family excludes one length-r residue
    window and the three windows partition the residues, so every point is
    kept by at least one family.  Distinct blocks of one family are
    separated by an excluded window: distance at least r + 1.
    """
    if n < 1:
        raise GraphError("grid side must be >= 1")
    if r < 1:
        raise GraphError("scale r must be >= 1")
    period = 3 * r
    excluded = []
    for i in range(3):
        window = {(t + 2 * r + i * r) % period for t in range(r)}
        excluded.append(window)
    all_residues = set(range(period))
    if (
        excluded[0] | excluded[1] | excluded[2] != all_residues
        or sum(len(w) for w in excluded) != period
    ):
        raise GraphError("residue windows must partition")  # construction guarantee

    ids = np.arange(n * n, dtype=np.int64)
    xs, ys = ids // n, ids % n
    families = []
    for i in range(3):
        sx, sy = xs - i * r, ys - i * r
        keep = ((sx % period) < 2 * r) & ((sy % period) < 2 * r)
        bx = sx[keep] // period
        by = sy[keep] // period
        kept_ids = ids[keep]
        key = (bx - bx.min() if keep.any() else bx) * (2 * n) + (by - by.min() if keep.any() else by)
        order = np.argsort(key, kind="stable")
        skey = key[order]
        boundaries = np.nonzero(np.diff(skey))[0] + 1
        clusters = tuple(
            tuple(int(v) for v in np.sort(kept_ids[order][grp]))
            for grp in np.split(np.arange(order.size), boundaries)
        ) if order.size else ()
        families.append(clusters)
    return Cover(r=r, claimed_D=4 * r, families=tuple(families))


# ---------------------------------------------------------------------------
# Coordinate slices: two families of intervals mod 3r

def interval_slice_cover(G: Graph, coord, r: int, vertices=None) -> Cover:
    """Cover a vertex set by intervals of a 1-Lipschitz integer coordinate.

    Family 0 takes residues [0, 2r) of the coordinate mod 3r, family 1 the
    remaining residues [2r, 3r); clusters group vertices sharing the 3r-cell.
    Consecutive same-family clusters are separated by at least r + 1 in the
    coordinate, hence in the graph.  The claimed bound is the measured
    maximum cluster diameter (reported, not presumed).
    """
    if r < 1:
        raise GraphError("scale r must be >= 1")
    values = _coord_array(G, coord)
    members = (
        np.arange(G.n, dtype=np.int64)
        if vertices is None
        else np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    )
    if members.size == 0:
        raise GraphError("empty vertex set")
    in_set = np.zeros(G.n, dtype=bool)
    in_set[members] = True
    for u, v in G.edges:
        if in_set[u] and in_set[v] and abs(int(values[u]) - int(values[v])) > 1:
            raise GraphError(
                f"coordinate is not 1-Lipschitz across edge {u}-{v}: "
                f"{int(values[u])} vs {int(values[v])}"
            )

    period = 3 * r
    vals = values[members]
    residue = vals % period
    cell = vals // period
    fam = np.where(residue < 2 * r, 0, 1)
    families: list[list[tuple[int, ...]]] = [[], []]
    for f in (0, 1):
        mask = fam == f
        if not mask.any():
            continue
        keys = cell[mask]
        mem = members[mask]
        order = np.argsort(keys, kind="stable")
        skey = keys[order]
        boundaries = np.nonzero(np.diff(skey))[0] + 1
        for grp in np.split(order, boundaries):
            families[f].append(tuple(int(v) for v in np.sort(mem[grp])))

    measured = 0
    for family in families:
        for cluster in family:
            diam = kernels.set_diameter(
                G._indptr, G._indices, np.asarray(cluster, dtype=np.int32)
            )
            if diam == -2:
                raise GraphError("cluster spans unreachable vertices")
            measured = max(measured, int(diam))
    fams = tuple(tuple(f) for f in families if f)
    return Cover(r=r, claimed_D=measured, families=fams)


def _coord_array(G: Graph, coord) -> np.ndarray:
    if callable(coord):
        return np.asarray([int(coord(v)) for v in range(G.n)], dtype=np.int64)
    arr = np.asarray(coord, dtype=np.int64)
    if arr.shape != (G.n,):
        raise GraphError("coordinate must assign every vertex")
    return arr


# ---------------------------------------------------------------------------
# Layered combination: blocks of r+1 layers, alternating parity

def layered_combine(G: Graph, layering: Layering, r: int, slicer) -> Cover:
    """Cover G by covering each block of r + 1 consecutive layers.

    ``slicer(G, vertices, r)`` must return a Cover of exactly that vertex
    set.  Output family = (block parity, slice family index); blocks of the
    same parity are 2(r+1) layers apart at their nearest edges, so their
    clusters can never conflict at scale r.  The combined cover should be
    re-certified by ``check_cover``; per-slice failures are raised with the
    offending block id.
    """
    if r < 1:
        raise GraphError("scale r must be >= 1")
    if len(layering.layers) != G.n:
        raise GraphError("layering does not match the graph")
    length = r + 1
    blocks = layering.blocks(length)
    slice_covers: dict[int, Cover] = {}
    for b in sorted(blocks):
        verts = blocks[b]
        try:
            sub = slicer(G, verts, r)
        except GraphError as exc:
            raise GraphError(f"slice cover failed on block {b}: {exc}") from exc
        want = set(verts)
        got = {v for fam in sub.families for cl in fam for v in cl}
        if got != want:
            missing = sorted(want - got)[:3]
            foreign = sorted(got - want)[:3]
            raise GraphError(
                f"slice cover on block {b} mismatches its vertex set "
                f"(missing {missing}, foreign {foreign})"
            )
        slice_covers[b] = sub

    width = max((c.family_count for c in slice_covers.values()), default=0)
    families: list[list[tuple[int, ...]]] = [[] for _ in range(2 * width)]
    claimed = 0
    for b, sub in sorted(slice_covers.items()):
        parity = b % 2
        claimed = max(claimed, sub.claimed_D)
        for fi, family in enumerate(sub.families):
            families[parity * width + fi].extend(family)
    fams = tuple(tuple(f) for f in families if f)
    return Cover(r=r, claimed_D=claimed, families=fams)


# ---------------------------------------------------------------------------
# Seeded fallback: greedy ball carving with first-fit families

class CoverSearchFailed(GraphError):
    """Raised when greedy carving cannot fit within the family budget."""


def greedy_cover(G: Graph, r: int, max_families: int, seed: int) -> Cover:
    """Carve balls of radius in [r, 3r] around random uncovered seeds and
    first-fit them into families respecting strict r-separation.  The result
    is always checker-certified before being returned; failure to fit is
    reported as CoverSearchFailed (no impossibility implied)."""
    if r < 1:
        raise GraphError("scale r must be >= 1")
    if max_families < 1:
        raise GraphError("need at least one family")
    rng = np.random.default_rng(seed)
    uncovered = np.ones(G.n, dtype=bool)
    families: list[list[tuple[int, ...]]] = []
    family_mask: list[np.ndarray] = []
    while uncovered.any():
        pool = np.nonzero(uncovered)[0]
        center = int(pool[rng.integers(0, pool.size)])
        radius = int(rng.integers(r, 3 * r + 1))
        dist = kernels.bfs_limited(G._indptr, G._indices, center, radius)
        members = np.nonzero((dist >= 0) & uncovered)[0].astype(np.int32)
        uncovered[members] = False
        near = kernels.multi_source(G._indptr, G._indices, members)
        reach = (near >= 0) & (near <= r)
        placed = False
        for idx, mask in enumerate(family_mask):
            conflict = mask & reach
            if not conflict.any():
                families[idx].append(tuple(int(v) for v in members))
                mask[members] = True
                placed = True
                break
        if not placed:
            if len(families) >= max_families:
                raise CoverSearchFailed(
                    f"could not place a cluster within {max_families} families"
                )
            families.append([tuple(int(v) for v in members)])
            mask = np.zeros(G.n, dtype=bool)
            mask[members] = True
            family_mask.append(mask)
    cover = Cover(r=r, claimed_D=6 * r, families=tuple(tuple(f) for f in families))
    report = check_cover(G, cover)
    if not report.ok:
        raise CoverSearchFailed(
            "greedy construction produced an invalid cover: "
            + ", ".join(report.failed())
        )
    return cover


# ---------------------------------------------------------------------------
# Dilation sampling

@dataclass
class ControlSample:
    """Certified (r, measured D, family count) triples for one graph family."""

    name: str
    entries: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def dilation(self) -> float:
        return max((d / r for r, d, _ in self.entries), default=0.0)

    def to_csv(self) -> str:
        lines = ["r,D,families,c"]
        for r, d, fams in self.entries:
            lines.append(f"{r},{d},{fams},{d / r:.6g}")
        lines.append(f"# max dilation,{self.dilation:.6g}")
        return "\n".join(lines) + "\n"


def sample_control(G: Graph, name: str, build, scales) -> ControlSample:
    """Run ``build(r)`` over the scales, certify each cover, record triples."""
    sample = ControlSample(name=name)
    for r in scales:
        cover = build(r)
        report = check_cover(G, cover)
        if not report.ok:
            raise GraphError(
                f"cover at scale {r} failed certification: " + ", ".join(report.failed())
            )
        sample.entries.append((r, int(report.measured_bound), report.family_count))
    return sample
