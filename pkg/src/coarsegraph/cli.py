"""Command line front end: reproducible experiments over canonical JSON.

Conventions shared by every subcommand: inputs are file paths or ``-`` for
stdin; ``--out`` redirects the artifact (default stdout); JSON is emitted
with sorted keys and a trailing newline so identical configurations give
byte-identical files.  Exit codes: 0 success, 1 a verifier said no (the
report still gets emitted), 2 malformed input.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .dimension import (
    CoverSearchFailed,
    bfs_layering,
    check_cover,
    cover_from_json,
    greedy_cover,
    grid_shift_cover,
    interval_slice_cover,
    layered_combine,
    sample_control,
    tree_band_cover,
)
from .fatminor import (
    certificate_from_json,
    claw_construction,
    search_fat_minor,
    verify_certificate,
)
from .graphs import (
    Graph,
    GraphError,
    all_pairs_distances,
    bfs_distances,
    dumps_canonical,
    graph_from_json,
    graph_to_json,
)
from .lcr import (
    crossing_upper_bound,
    drawing_from_json,
    one_planar_pipeline,
    planarize_drawing,
    random_one_planar_drawing,
    realize_in_power,
)
from .planarize import build_planarization, verify_planarization
from .qi import measure_distortion, qimap_from_json
from .sources import ball, resolve_source, square_grid, tree_sum_planar
from .treedec import DecompositionError, decomposition_from_json, decomposition_to_json

_INPUT_ERRORS = (GraphError, DecompositionError, KeyError, TypeError, ValueError)


def _die_input(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


def _load_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        _die_input(f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _die_input(f"invalid JSON in {path}: {exc}")


def _write(text: str, out: str | None):
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(obj: dict, out: str | None):
    _write(dumps_canonical(obj), out)


def _parse(stage, *args):
    """Run an input-parsing callable; any failure is an input error."""
    try:
        return stage(*args)
    except _INPUT_ERRORS as exc:
        _die_input(str(exc))


@click.group()
@click.option(
    "--threads",
    type=int,
    default=1,
    show_default=True,
    envvar="COARSEGRAPH_THREADS",
    help="Worker threads for all-pairs distance scans.",
)
@click.pass_context
def main(ctx, threads: int):
    """Coarse graph geometry toolbox."""
    ctx.obj = {"threads": max(1, threads)}


# ---------------------------------------------------------------------------
# generate

@main.command()
@click.option("--source", "source_name", default="grid2", show_default=True)
@click.option("--radius", type=int, default=None, help="Window radius (window kind).")
@click.option(
    "--kind",
    type=click.Choice(["window", "tree-sum"]),
    default="window",
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pieces", type=int, default=8, show_default=True)
@click.option("--piece-size", type=int, default=12, show_default=True)
@click.option("--small-fraction", type=float, default=0.3, show_default=True)
@click.option("--max-adhesion", type=int, default=3, show_default=True)
@click.option("--out", default=None)
def generate(source_name, radius, kind, seed, pieces, piece_size, small_fraction, max_adhesion, out):
    """Emit a window around a vertex-transitive source, or a seeded
    tree-of-pieces graph with its decomposition."""
    if kind == "window":
        if radius is None:
            _die_input("--radius is required for window generation")
        src = _parse(resolve_source, source_name)
        window = _parse(ball, src, radius)
        _emit(
            {
                "source": window.source_name,
                "radius": window.radius,
                "center": window.center,
                "boundary": sorted(window.boundary),
                "graph": graph_to_json(window.graph),
            },
            out,
        )
        return
    G, td = _parse(
        lambda: tree_sum_planar(
            seed,
            pieces=pieces,
            piece_size=piece_size,
            small_fraction=small_fraction,
            max_adhesion=max_adhesion,
        )
    )
    _emit(
        {"seed": seed, "graph": graph_to_json(G), "decomposition": decomposition_to_json(td)},
        out,
    )


# ---------------------------------------------------------------------------
# planarize

@main.command()
@click.argument("input", default="-")
@click.option("--small-threshold", type=int, default=6, show_default=True)
@click.option(
    "--keep-small-torsos",
    is_flag=True,
    help="Copy small bags as full torsos instead of spanning trees.",
)
@click.option("--out", default=None)
@click.pass_context
def planarize(ctx, input, small_threshold, keep_small_torsos, out):
    """Per-bag copies joined by link edges, with the full certificate."""
    obj = _load_json(input)
    G = _parse(graph_from_json, obj["graph"] if "graph" in obj else obj)
    td = _parse(decomposition_from_json, obj.get("decomposition", obj), small_threshold)
    try:
        oracle = all_pairs_distances(G, threads=ctx.obj["threads"])
        plan = build_planarization(G, td, small_as_trees=not keep_small_torsos, oracle=oracle)
        report = verify_planarization(G, td, plan)
    except (GraphError, DecompositionError) as exc:
        _die_input(str(exc))
    payload = plan.to_json()
    payload["report"] = report.to_json()
    _emit(payload, out)
    if not report.ok:
        sys.exit(1)


# ---------------------------------------------------------------------------
# qi-measure

@main.command("qi-measure")
@click.argument("input", default="-")
@click.option("--rate", type=int, default=None, help="Claimed multiplicative rate.")
@click.option("--eps", type=int, default=None, help="Claimed additive error.")
@click.option("--density", type=int, default=None, help="Claimed surjectivity radius.")
@click.option("--out", default=None)
def qi_measure(input, rate, eps, density, out):
    """Exact distortion profile of a vertex map between two graphs."""
    obj = _load_json(input)

    def build():
        dom = graph_from_json(obj["domain"])
        cod = graph_from_json(obj["codomain"])
        return qimap_from_json(dom, cod, obj)

    f = _parse(build)
    report = measure_distortion(f)
    payload = report.to_json()
    verdict = None
    if rate is not None:
        if eps is None:
            _die_input("--rate needs --eps to state a full claim")
        verdict = report.is_quasi_isometry(rate, eps, density)
        payload["claim"] = {
            "rate": rate,
            "eps": eps,
            "density": density,
            "holds": verdict,
        }
    _emit(payload, out)
    if verdict is False:
        sys.exit(1)


# ---------------------------------------------------------------------------
# fatminor

@main.group()
def fatminor():
    """Fat-minor certificates: verify, search, construct."""


@fatminor.command("verify")
@click.argument("input", default="-")
@click.option("--out", default=None)
def fatminor_verify(input, out):
    """Check every clause of a certificate against its host graph."""
    obj = _load_json(input)
    G = _parse(graph_from_json, obj["graph"])
    cert = _parse(certificate_from_json, obj["certificate"])
    report = verify_certificate(G, cert)
    _emit(report.to_json(), out)
    if not report.ok:
        sys.exit(1)


@fatminor.command("search")
@click.argument("input", default="-")
@click.option("--k", type=int, required=True)
@click.option("--budget", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None)
def fatminor_search(input, k, budget, seed, out):
    """Randomized search for a pattern at fatness k; verified or nothing."""
    obj = _load_json(input)
    G = _parse(graph_from_json, obj["graph"])
    H = _parse(graph_from_json, obj["pattern"])
    cert = search_fat_minor(G, H, k, budget=budget, seed=seed)
    if cert is None:
        _emit({"found": False, "k": k, "budget": budget, "seed": seed}, out)
        sys.exit(1)
    _emit({"found": True, "certificate": cert.to_json()}, out)


@fatminor.command("claw")
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--k", type=int, required=True)
@click.option("--out", default=None)
def fatminor_claw(m, k, out):
    """Explicit complete-bipartite certificate in a claw-times-path window."""
    try:
        window, cert = claw_construction(m, k)
    except GraphError as exc:
        _die_input(str(exc))
    report = verify_certificate(window.graph, cert)
    _emit(
        {
            "window": {
                "source": window.source_name,
                "radius": window.radius,
                "graph": graph_to_json(window.graph),
            },
            "certificate": cert.to_json(),
            "report": report.to_json(),
        },
        out,
    )
    if not report.ok:
        sys.exit(1)


# ---------------------------------------------------------------------------
# cover

@main.group()
def cover():
    """Separated bounded covers: build, check, sample."""


def _coordinate(G: Graph, spec: str) -> np.ndarray:
    """Parse a coordinate spec: ``bfs:ROOT`` (distance to a root) or
    ``label:AXIS`` (component AXIS of "(x,y)"-style labels)."""
    kind, _, arg = spec.partition(":")
    if kind == "bfs":
        root = int(arg or 0)
        if not 0 <= root < G.n:
            raise GraphError(f"coordinate root {root} out of range")
        dist = bfs_distances(G, root)
        if not np.all(np.isfinite(dist)):
            raise GraphError("bfs coordinate needs a connected graph")
        return dist.astype(np.int64)
    if kind == "label":
        axis = int(arg or 0)
        out = np.zeros(G.n, dtype=np.int64)
        for v in range(G.n):
            label = G.labels.get(v)
            if label is None:
                raise GraphError(f"vertex {v} has no coordinate label")
            parts = label.strip("()").split(",")
            out[v] = int(parts[axis])
        return out
    raise GraphError(f"unknown coordinate spec {spec!r}")


@cover.command("build")
@click.argument("input", default="-", required=False)
@click.option(
    "--method",
    type=click.Choice(["greedy", "tree-band", "grid-shift", "interval", "layered"]),
    required=True,
)
@click.option("--r", "radius", type=int, required=True)
@click.option("--n", "grid_n", type=int, default=None, help="Grid side (grid-shift).")
@click.option("--root", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-families", type=int, default=8, show_default=True)
@click.option("--coord", default="bfs:0", show_default=True)
@click.option("--out", default=None)
def cover_build(input, method, radius, grid_n, root, seed, max_families, coord, out):
    """Build a cover with the chosen method and certify it on the spot."""
    if method == "grid-shift":
        if grid_n is None:
            _die_input("--n is required for grid-shift")
        G = square_grid(grid_n)
        built = _parse(grid_shift_cover, grid_n, radius)
    else:
        obj = _load_json(input)
        G = _parse(graph_from_json, obj["graph"] if "graph" in obj else obj)
        try:
            if method == "tree-band":
                built = tree_band_cover(G, root, radius)
            elif method == "greedy":
                built = greedy_cover(G, radius, max_families, seed)
            elif method == "interval":
                built = interval_slice_cover(G, _coordinate(G, coord), radius)
            else:
                layering = bfs_layering(G, [root])
                axis = _coordinate(G, coord)

                def slicer(graph, verts, rr):
                    return interval_slice_cover(graph, axis, rr, vertices=verts)

                built = layered_combine(G, layering, radius, slicer)
        except CoverSearchFailed as exc:
            _emit({"found": False, "reason": str(exc)}, out)
            sys.exit(1)
        except GraphError as exc:
            _die_input(str(exc))
    report = check_cover(G, built)
    _emit({"cover": built.to_json(), "report": report.to_json()}, out)
    if not report.ok:
        sys.exit(1)


@cover.command("check")
@click.argument("input", default="-")
@click.option("--out", default=None)
def cover_check(input, out):
    """Re-certify a cover against its graph."""
    obj = _load_json(input)
    G = _parse(graph_from_json, obj["graph"])
    built = _parse(cover_from_json, obj["cover"])
    report = check_cover(G, built)
    _emit(report.to_json(), out)
    if not report.ok:
        sys.exit(1)


@cover.command("sample")
@click.argument("input", default="-", required=False)
@click.option("--method", type=click.Choice(["greedy", "tree-band", "grid-shift"]), required=True)
@click.option("--scales", default="1,2,4,8", show_default=True)
@click.option("--name", default=None)
@click.option("--n", "grid_n", type=int, default=None)
@click.option("--root", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-families", type=int, default=8, show_default=True)
@click.option("--out", default=None)
def cover_sample(input, method, scales, name, grid_n, root, seed, max_families, out):
    """Certified (r, D, families) control triples as CSV plot data."""
    try:
        rs = [int(tok) for tok in scales.split(",") if tok.strip()]
    except ValueError:
        _die_input(f"bad scale list {scales!r}")
    if method == "grid-shift":
        if grid_n is None:
            _die_input("--n is required for grid-shift")
        G = square_grid(grid_n)
        build = lambda r: grid_shift_cover(grid_n, r)
    else:
        obj = _load_json(input)
        G = _parse(graph_from_json, obj["graph"] if "graph" in obj else obj)
        if method == "tree-band":
            build = lambda r: tree_band_cover(G, root, r)
        else:
            build = lambda r: greedy_cover(G, r, max_families, seed)
    try:
        sample = sample_control(G, name or method, build, rs)
    except (CoverSearchFailed, GraphError) as exc:
        _write(f"# failed: {exc}\n", out)
        sys.exit(1)
    _write(sample.to_csv(), out)


# ---------------------------------------------------------------------------
# lcr

@main.group()
def lcr():
    """Drawings, crossing replacement, and power realizations."""


@lcr.command("draw")
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None)
def lcr_draw(n, seed, out):
    """Seeded straight-line drawing with at most one crossing per edge."""
    try:
        G, drawing = random_one_planar_drawing(n, seed)
    except GraphError as exc:
        _die_input(str(exc))
    _emit({"graph": graph_to_json(G), "drawing": drawing.to_json()}, out)


@lcr.command("realize")
@click.argument("input", default="-")
@click.option("--k", type=int, required=True)
@click.option("--out", default=None)
def lcr_realize(input, k, out):
    """Carry guest edges on canonical paths inside the host's k-th power."""
    obj = _load_json(input)

    def build():
        H = graph_from_json(obj["host"])
        G = graph_from_json(obj["guest"])
        return realize_in_power(H, G, k, obj["injection"])

    real = _parse(build)
    _emit(real.to_json(), out)


@lcr.command("bound")
@click.argument("input", default="-")
@click.option("--out", default=None)
def lcr_bound(input, out):
    """Per-edge tube crossing bound of a realization, with the formula."""
    obj = _load_json(input)

    def build():
        H = graph_from_json(obj["host"])
        G = graph_from_json(obj["guest"])
        return realize_in_power(H, G, int(obj["k"]), obj["injection"])

    real = _parse(build)
    _emit(crossing_upper_bound(real).to_json(), out)


@lcr.command("planarize-drawing")
@click.argument("input", default="-")
@click.option("--out", default=None)
def lcr_planarize_drawing(input, out):
    """Replace crossings by vertices; non-planar outcomes exit 1."""
    obj = _load_json(input)
    G = _parse(graph_from_json, obj["graph"])
    drawing = _parse(drawing_from_json, obj["drawing"])
    try:
        result = planarize_drawing(G, drawing)
    except GraphError as exc:
        _die_input(str(exc))
    _emit(result.to_json(), out)
    if not result.planar:
        sys.exit(1)


# ---------------------------------------------------------------------------
# pipeline

@main.group()
def pipeline():
    """Multi-module integration chains."""


@pipeline.command("corollary45")
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rate", type=int, default=2, show_default=True)
@click.option("--out", default=None)
def pipeline_corollary45(n, seed, rate, out):
    """Quasi-isometry to a once-crossed drawing, certified all the way to a
    bounded power of a planar graph."""
    try:
        payload = one_planar_pipeline(n, seed, rate)
    except GraphError as exc:
        _emit({"ok": False, "error": str(exc)}, out)
        sys.exit(1)
    payload["ok"] = True
    _emit(payload, out)


if __name__ == "__main__":
    main()
