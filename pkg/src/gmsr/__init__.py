"""Mesh interest point detection and benchmark evaluation.

The pipeline scores each vertex by how far its ring neighborhoods sit
from the local tangent plane and how much the normals turn, harmonically
averaged per ring, normalized per smoothing level, and multiplied across
levels; ring-based non-maxima suppression and a sparse refinement stage
turn the response field into a small set of interest points.
"""

from .detector import DetectionResult, DetectorConfig, detect
from .evaluation import (
    GroundTruthFormatError,
    GroundTruthSet,
    MatchResult,
    UndefinedScoreError,
    aggregate,
    evaluate_detections,
    f1,
    geodesic_distances,
    iou,
    load_ground_truth,
    match_points,
    parse_ground_truth,
)
from .measures import (
    angle_between_normals,
    angle_measure,
    distance_measure,
    harmonic_mean,
    measure_field,
    tangent_plane_distance,
)
from .mesh import (
    Mesh,
    MeshFormatError,
    NormalField,
    RingNeighborhoods,
    bbox_diagonal,
    compute_vertex_normals,
    k_rings,
    parse_obj,
    parse_off,
    write_off,
)
from .refine import (
    BRUTE_FORCE_LIMIT,
    InterestPointSet,
    RefinementProblem,
    brute_force_refine,
    selection_objective,
    solve_refinement,
    sparse_refine,
)
from .response import (
    CandidateSet,
    ResponseField,
    final_response,
    non_maxima_suppression,
    per_scale_response,
)
from .scale_space import ScaleStack, base_scale, build_scale_stack, gaussian_smooth
from .visualize import saliency_ply

__version__ = "0.1.0"

__all__ = [
    "BRUTE_FORCE_LIMIT",
    "CandidateSet",
    "DetectionResult",
    "DetectorConfig",
    "GroundTruthFormatError",
    "GroundTruthSet",
    "InterestPointSet",
    "MatchResult",
    "Mesh",
    "MeshFormatError",
    "NormalField",
    "RefinementProblem",
    "ResponseField",
    "RingNeighborhoods",
    "ScaleStack",
    "UndefinedScoreError",
    "aggregate",
    "angle_between_normals",
    "angle_measure",
    "base_scale",
    "bbox_diagonal",
    "brute_force_refine",
    "build_scale_stack",
    "compute_vertex_normals",
    "detect",
    "distance_measure",
    "evaluate_detections",
    "f1",
    "final_response",
    "gaussian_smooth",
    "geodesic_distances",
    "harmonic_mean",
    "iou",
    "k_rings",
    "load_ground_truth",
    "match_points",
    "measure_field",
    "non_maxima_suppression",
    "parse_ground_truth",
    "parse_obj",
    "parse_off",
    "per_scale_response",
    "saliency_ply",
    "selection_objective",
    "solve_refinement",
    "sparse_refine",
    "tangent_plane_distance",
    "write_off",
]
