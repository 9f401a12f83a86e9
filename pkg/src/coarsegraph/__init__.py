"""Coarse geometry toolkit for locally finite graphs.

Certified constructions and measurements: tree-decomposition
planarization, quasi-isometry distortion, fat-minor certificates,
separated bounded covers, and crossing-bounded power realizations.
Every builder ships with an independent verifier; nothing is trusted
that is not re-checked.
"""

from .kernels import BACKEND
from .graphs import (
    UNREACHABLE,
    DistanceOracle,
    Graph,
    GraphError,
    all_pairs_distances,
    attach_pendants,
    bfs_distances,
    blowup,
    connected_components,
    disjoint_union,
    dumps_canonical,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    is_connected,
    multi_source_distances,
    pendant_power_embedding,
    power,
    strong_product,
    subdivide,
    subset_diameter,
)
from .planarity import (
    PlanarityResult,
    classify_kuratowski,
    count_faces,
    planarity_check,
    verify_rotation_system,
)
from .treedec import (
    PLANAR,
    SMALL,
    DecompositionError,
    TreeDecomposition,
    ValidationReport,
    adhesion,
    adhesion_sets,
    decomposition_from_json,
    decomposition_to_json,
    edge_separation,
    is_tight,
    torso,
    validate,
    width,
)
from .sources import (
    BUILTIN_SOURCES,
    GraphSource,
    Window,
    ball,
    grid_coordinates,
    resolve_source,
    square_grid,
    tree_sum_planar,
)
from .planarize import (
    ConstantPack,
    Planarization,
    PlanReport,
    build_planarization,
    compute_constants,
    verify_planarization,
)
from .qi import (
    DistortionReport,
    PowerBlowupEmbedding,
    PruneResult,
    QIMap,
    cover_pullback,
    embed_power_blowup,
    measure_distortion,
    prune_to_bounded_degree,
    qimap_from_json,
)
from .fatminor import (
    FatMinorCertificate,
    certificate_from_json,
    claw_construction,
    search_fat_minor,
    verify_certificate,
)
from .dimension import (
    ControlSample,
    Cover,
    CoverReport,
    CoverSearchFailed,
    Layering,
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
from .lcr import (
    Crossing,
    CrossingBound,
    Drawing,
    DrawingRestriction,
    PlanarizedDrawing,
    PowerRealization,
    crossing_formula,
    crossing_upper_bound,
    drawing_from_json,
    one_planar_pipeline,
    planarize_drawing,
    random_one_planar_drawing,
    realize_in_power,
    restrict_drawing,
    validate_drawing,
)

__version__ = "0.1.0"
