"""End-to-end interest point detection pipeline.

Ties the stages together: ring neighborhoods on the input connectivity,
a stack of smoothed copies of the geometry, distance/angle measures per
level, normalized per-level responses combined multiplicatively, ring
based non-maxima suppression, and sparse refinement of the survivors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh, k_rings
from .measures import measure_field
from .refine import InterestPointSet, sparse_refine
from .response import (
    CandidateSet,
    ResponseField,
    final_response,
    non_maxima_suppression,
    per_scale_response,
)
from .scale_space import ScaleStack, build_scale_stack, validate_multipliers


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable parameters of the detector.

    rings
        Neighborhood depth for the distance/angle measures.
    alpha
        Weight of the normalized angle term in the per-level response.
    nms_rings
        Neighborhood depth for non-maxima suppression.
    beta
        Sparsity penalty of the refinement stage.
    scales
        Smoothing widths as multiples of the base width (0.3% of the
        bounding box diagonal).
    """

    rings: int = 6
    alpha: float = 2.5
    nms_rings: int = 10
    beta: float = 0.03
    scales: tuple[int, ...] = (1, 3, 5)

    def __post_init__(self):
        if self.rings < 1:
            raise ValueError("rings must be at least 1")
        if self.nms_rings < 1:
            raise ValueError("nms_rings must be at least 1")
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))
        validate_multipliers(self.scales)


@dataclass(frozen=True)
class DetectionResult:
    """Everything the pipeline produced for one mesh."""

    config: DetectorConfig
    base_scale: float
    stack: ScaleStack = field(repr=False)
    response: ResponseField = field(repr=False)
    candidates: CandidateSet
    points: InterestPointSet


def detect(mesh: Mesh, config: DetectorConfig | None = None) -> DetectionResult:
    """Run the full pipeline on ``mesh``.

    Ring neighborhoods are computed once from the input connectivity and
    shared by every smoothing level; smoothing moves vertices but never
    rewires the mesh.
    """
    if config is None:
        config = DetectorConfig()
    depth = max(config.rings, config.nms_rings)
    rings = k_rings(mesh, depth)
    stack = build_scale_stack(mesh, config.scales)

    per_scale: dict[int, np.ndarray] = {}
    evaluable = None
    for level in stack.levels:
        measures = measure_field(level.mesh, level.normals, rings, config.rings)
        rho = per_scale_response(
            measures.distance, measures.angle, config.alpha, measures.evaluable
        )
        per_scale[level.multiplier] = rho
        if evaluable is None:
            evaluable = measures.evaluable
        else:
            evaluable = evaluable & measures.evaluable

    combined = final_response([per_scale[m] for m in stack.multipliers])
    response = ResponseField(
        per_scale=per_scale,
        combined=combined,
        alpha=config.alpha,
        nms_rings=config.nms_rings,
    )
    candidates = non_maxima_suppression(rings, combined, config.nms_rings)
    points = sparse_refine(candidates, config.beta)
    return DetectionResult(
        config=config,
        base_scale=stack.base_scale,
        stack=stack,
        response=response,
        candidates=candidates,
        points=points,
    )
