"""Gaussian scale space over mesh vertex positions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .mesh import Mesh, NormalField, bbox_diagonal, compute_vertex_normals

# Fraction of the bounding-box main diagonal used as the unit smoothing width.
BASE_SCALE_FRACTION = 0.003

# Neighborhood cutoff in standard deviations; captures >99.7% of the kernel
# mass per axis while keeping each pass near-linear.
CUTOFF_SIGMAS = 3.0


def base_scale(mesh: Mesh) -> float:
    """Unit smoothing width: 0.3% of the bounding-box main diagonal."""
    diagonal = bbox_diagonal(mesh)
    if diagonal == 0.0:
        raise ValueError("mesh bounding box has zero diagonal; no scale can be defined")
    return BASE_SCALE_FRACTION * diagonal


def gaussian_smooth(mesh: Mesh, width: float) -> Mesh:
    """Replace each vertex by a Gaussian-weighted average of nearby vertices.

    Every source vertex within Euclidean distance ``CUTOFF_SIGMAS * width``
    contributes weight exp(-dist^2 / (2 width^2)); weights are normalized to
    sum to one over the included set, which always contains the vertex
    itself. Connectivity is unchanged. Positions are accumulated as offsets
    from each vertex so the pass is translation-invariant.
    """
    if width <= 0.0:
        raise ValueError("smoothing width must be positive")
    points = mesh.vertices
    n = mesh.vertex_count
    tree = cKDTree(points)
    pairs = tree.query_pairs(CUTOFF_SIGMAS * width, output_type="ndarray")
    if pairs.shape[0] == 0:
        return mesh.with_vertices(points.copy())
    diff = points[pairs[:, 1]] - points[pairs[:, 0]]
    weight = np.exp(-(diff * diff).sum(axis=1) / (2.0 * width * width))
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    off = np.concatenate([diff, -diff])
    w = np.concatenate([weight, weight])
    total = 1.0 + np.bincount(src, weights=w, minlength=n)  # self weight is exp(0)
    moved = np.empty_like(points)
    for c in range(3):
        moved[:, c] = points[:, c] + np.bincount(src, weights=w * off[:, c], minlength=n) / total
    return mesh.with_vertices(moved)


@dataclass(frozen=True)
class ScaleLevel:
    multiplier: int
    width: float
    mesh: Mesh
    normals: NormalField


@dataclass(frozen=True)
class ScaleStack:
    """Family of progressively smoothed copies of one mesh.

    Level i uses width ``multipliers[i] * base_scale`` and shares the source
    connectivity; only positions (and therefore normals) change.
    """

    source: Mesh
    base_scale: float
    multipliers: tuple
    levels: tuple


def validate_multipliers(multipliers) -> tuple:
    ms = tuple(int(m) for m in multipliers)
    if len(ms) == 0:
        raise ValueError("at least one scale multiplier is required")
    if any(m <= 0 for m in ms):
        raise ValueError("scale multipliers must be positive")
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("scale multipliers must be strictly increasing")
    return ms


def build_scale_stack(mesh: Mesh, multipliers=(1, 3, 5)) -> ScaleStack:
    """Smooth the mesh at each multiplier and recompute normals per level."""
    ms = validate_multipliers(multipliers)
    unit = base_scale(mesh)
    levels = []
    for m in ms:
        width = m * unit
        smoothed = gaussian_smooth(mesh, width)
        levels.append(
            ScaleLevel(
                multiplier=m,
                width=width,
                mesh=smoothed,
                normals=compute_vertex_normals(smoothed),
            )
        )
    return ScaleStack(
        source=mesh, base_scale=unit, multipliers=ms, levels=tuple(levels)
    )
