"""Timing comparison of the compiled kernels against the pure-Python
reference implementation.

Runs every hot kernel on the same CSR arrays with both backends, checks
that the outputs agree, and prints one table row per workload:

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from coarsegraph import Graph
from coarsegraph import _pykernels
from coarsegraph.sources import square_grid

try:
    from coarsegraph import _ckernels
except ImportError:
    _ckernels = None


def random_tree(n, seed):
    rng = np.random.default_rng(seed)
    return Graph(n, [(int(rng.integers(0, v)), v) for v in range(1, n)])


def timed(fn, repeats=1):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def workloads(quick):
    side = 30 if quick else 60
    tree_n = 5_000 if quick else 30_000
    grid = square_grid(side)
    apsp_grid = square_grid(16 if quick else 32)
    tree = random_tree(tree_n, 0)
    rng = np.random.default_rng(1)

    sources = rng.integers(0, grid.n, size=50 if quick else 200)
    yield (
        f"bfs x{len(sources)} (grid {side}x{side})",
        lambda k: [k.bfs(grid._indptr, grid._indices, int(s)) for s in sources],
    )

    n = apsp_grid.n
    def apsp(k):
        out = np.empty((n, n), dtype=np.int32)
        k.apsp_rows(apsp_grid._indptr, apsp_grid._indices, out, 0, n)
        return out
    yield (f"apsp ({n} vertices)", apsp)

    roots = rng.integers(0, tree.n, size=64).astype(np.int32)
    yield (
        f"multi_source (tree n={tree.n})",
        lambda k: k.multi_source(tree._indptr, tree._indices, roots),
    )

    members = np.sort(rng.choice(grid.n, size=grid.n // 9, replace=False)).astype(np.int32)
    yield (
        f"set_diameter (|S|={len(members)}, grid {side}x{side})",
        lambda k: k.set_diameter(grid._indptr, grid._indices, members),
    )

    owner = np.full(tree.n, -1, dtype=np.int32)
    picks = rng.choice(tree.n, size=tree.n // 20, replace=False)
    owner[picks] = rng.integers(0, 10, size=len(picks))
    yield (
        f"voronoi_min_separation (tree n={tree.n})",
        lambda k: k.voronoi_min_separation(tree._indptr, tree._indices, owner),
    )

    blocked = np.zeros(grid.n, dtype=np.uint8)
    blocked[rng.choice(grid.n, size=grid.n // 10, replace=False)] = 1
    starts = np.array([v for v in sources[:8] if not blocked[v]], dtype=np.int32)
    yield (
        f"masked_bfs_tree (grid {side}x{side})",
        lambda k: k.masked_bfs_tree(grid._indptr, grid._indices, starts, blocked),
    )


def same(a, b):
    if isinstance(a, (list, tuple)):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller instances")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled backend not built; showing pure-Python times only\n")

    name_w = 46
    print(f"{'workload':<{name_w}} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for name, run in workloads(args.quick):
        py_out, py_t = timed(lambda: run(_pykernels), args.repeats)
        if _ckernels is None:
            print(f"{name:<{name_w}} {'-':>10} {py_t:>9.3f}s {'-':>8}")
            continue
        c_out, c_t = timed(lambda: run(_ckernels), args.repeats)
        if not same(c_out, py_out):
            raise SystemExit(f"backend mismatch on {name!r}")
        print(f"{name:<{name_w}} {c_t:>9.3f}s {py_t:>9.3f}s {py_t / c_t:>7.1f}x")


if __name__ == "__main__":
    main()
