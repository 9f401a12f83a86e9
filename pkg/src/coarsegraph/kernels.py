"""Kernel backend selection.

Imports the compiled extension when present, otherwise falls back to the
pure-Python reference implementation.  Set ``COARSEGRAPH_PURE_PYTHON=1`` to
force the fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("COARSEGRAPH_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

bfs = _impl.bfs
bfs_limited = _impl.bfs_limited
multi_source = _impl.multi_source
masked_bfs_tree = _impl.masked_bfs_tree
set_diameter = _impl.set_diameter
voronoi_min_separation = _impl.voronoi_min_separation
apsp_rows = _impl.apsp_rows
