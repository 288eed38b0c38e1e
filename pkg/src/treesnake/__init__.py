"""Plane trees with spatial labels, their scaling limits, and random maps.

The package covers the discrete side (plane trees, Galton-Watson samplers,
re-rooting transforms, the tree encoding of rooted quadrangulations), the
continuum side (Brownian excursion and snake-head marginals on a grid), and
the exact enumeration machinery used to check the measure identities that
connect them.
"""

from treesnake.plane_tree import (
    ContourFunction,
    InvalidContour,
    InvalidPreorder,
    PlaneTree,
    Vertex,
    VertexNotInTree,
    build_tree,
    contour_of,
    enumerate_trees,
    leaves,
    subtree_from,
    tree_from_line,
    tree_of_contour,
    tree_to_line,
    truncate_at,
    visit_times,
)
from treesnake.spatial_tree import (
    EmptyVertex,
    ExitDecomposition,
    ExitSubtree,
    MinLabel,
    RootAboveLevel,
    RootNotAllowed,
    SingletonTree,
    SpatialContour,
    SpatialTree,
    companion_vertex,
    contour_csv,
    exit_decompose,
    min_label,
    reassemble,
    reroot_at,
    spatial_contour,
    spatial_from_json,
    spatial_to_json,
)
from treesnake.gw_sampler import (
    ImportanceSample,
    OffspringDistribution,
    RejectionBudgetExhausted,
    SampleConfig,
    SizeOverflow,
    StepDistribution,
    UnreachableSize,
    draw_measure,
    estimate_positive_probability,
    sample_conditioned,
    sample_conditioned_batch,
    sample_gw,
    sample_gw_sized,
    sample_label_extrema,
    sample_leaf_counts,
    sample_q_tree,
    sample_reroot_importance,
    sample_spatial,
    spawn_rngs,
)
from treesnake.exact_enum import (
    IrrationalMass,
    UnreachableSizeError,
    conditional_label_law,
    count_well_labelled,
    default_functionals,
    labelled_atoms,
    leaf_count_mean,
    q_weight,
    reroot_measures,
    tree_weight,
    verify_reroot_identity,
    verify_reroot_identity_closed,
    verify_size_law,
)
from treesnake.quadmap import (
    DistanceProfile,
    NotAQuadrangulation,
    NotWellLabelled,
    PlanarQuadrangulation,
    alpha_of,
    canonical_code,
    cvs_build,
    cvs_inverse,
    distances,
    enumerate_well_labelled,
    profile_csv,
    quad_from_json,
    quad_to_json,
    sample_radius_and_distance,
    sample_uniform_quad,
)
from treesnake.snake_limit import (
    EmptySample,
    LengthMismatch,
    NonUniqueMinimum,
    RescaledPath,
    SnakeFunctionals,
    SnakePath,
    functionals,
    ks_report,
    ks_two_sample,
    rescale_discrete,
    sample_excursion,
    sample_extrema,
    sample_positive_snake,
    sample_snake,
    sample_snake_head,
    samples_csv,
    verwaat_reroot,
)

__all__ = [
    "ContourFunction",
    "DistanceProfile",
    "EmptySample",
    "EmptyVertex",
    "ExitDecomposition",
    "ExitSubtree",
    "ImportanceSample",
    "InvalidContour",
    "InvalidPreorder",
    "IrrationalMass",
    "LengthMismatch",
    "MinLabel",
    "NonUniqueMinimum",
    "NotAQuadrangulation",
    "NotWellLabelled",
    "OffspringDistribution",
    "PlanarQuadrangulation",
    "PlaneTree",
    "RejectionBudgetExhausted",
    "RescaledPath",
    "RootAboveLevel",
    "RootNotAllowed",
    "SampleConfig",
    "SingletonTree",
    "SizeOverflow",
    "SnakeFunctionals",
    "SnakePath",
    "SpatialContour",
    "SpatialTree",
    "StepDistribution",
    "UnreachableSize",
    "UnreachableSizeError",
    "Vertex",
    "VertexNotInTree",
    "alpha_of",
    "build_tree",
    "canonical_code",
    "companion_vertex",
    "conditional_label_law",
    "contour_csv",
    "contour_of",
    "count_well_labelled",
    "cvs_build",
    "cvs_inverse",
    "default_functionals",
    "distances",
    "draw_measure",
    "enumerate_trees",
    "enumerate_well_labelled",
    "estimate_positive_probability",
    "exit_decompose",
    "functionals",
    "ks_report",
    "ks_two_sample",
    "labelled_atoms",
    "leaf_count_mean",
    "leaves",
    "min_label",
    "profile_csv",
    "q_weight",
    "quad_from_json",
    "quad_to_json",
    "reassemble",
    "reroot_at",
    "reroot_measures",
    "rescale_discrete",
    "sample_conditioned",
    "sample_conditioned_batch",
    "sample_excursion",
    "sample_extrema",
    "sample_gw",
    "sample_gw_sized",
    "sample_label_extrema",
    "sample_leaf_counts",
    "sample_positive_snake",
    "sample_q_tree",
    "sample_radius_and_distance",
    "sample_reroot_importance",
    "sample_snake",
    "sample_snake_head",
    "sample_spatial",
    "sample_uniform_quad",
    "samples_csv",
    "spatial_contour",
    "spatial_from_json",
    "spatial_to_json",
    "spawn_rngs",
    "subtree_from",
    "tree_from_line",
    "tree_of_contour",
    "tree_to_line",
    "tree_weight",
    "truncate_at",
    "verify_reroot_identity",
    "verify_reroot_identity_closed",
    "verify_size_law",
    "verwaat_reroot",
    "visit_times",
]
