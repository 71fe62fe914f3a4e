"""Per-vertex surface measures: tangent-plane offsets and normal angles.

Each measure is a sum, over the first K rings of a vertex, of the harmonic
mean of the raw per-neighbor quantity inside the ring. The harmonic mean
collapses to zero as soon as one neighbor lies in the tangent plane (or
shares the normal direction), which is what suppresses straight edges while
leaving genuine corners large.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, NormalField, RingNeighborhoods


def tangent_plane_distance(v, n, p) -> float:
    """Distance from point ``p`` to the plane through ``v`` orthogonal to ``n``.

    ``n`` must be unit length, which reduces the point-plane formula to
    ``|n . (p - v)|``.
    """
    v = np.asarray(v, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    return float(abs(np.dot(n, p - v)))


def angle_between_normals(n, m) -> float:
    """Angle in radians between two unit vectors, in [0, pi].

    The dot product is clamped to [-1, 1] to absorb rounding before arccos.
    """
    d = float(np.dot(np.asarray(n, dtype=np.float64), np.asarray(m, dtype=np.float64)))
    return float(np.arccos(min(1.0, max(-1.0, d))))


def harmonic_mean(values) -> float:
    """Harmonic mean W / sum(1/x) of nonnegative values.

    Defined as 0 for an empty list and whenever any value is 0, the
    continuous limit of the formula as a term approaches zero.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        return 0.0
    if np.any(vals == 0.0):
        return 0.0
    return float(vals.size / np.sum(1.0 / vals))


@dataclass(frozen=True)
class MeasureField:
    """Summed harmonic measures for one scale level.

    ``distance`` and ``angle`` hold NaN at vertices marked not evaluable
    (degenerate normals); ``evaluable`` is the authoritative marker.
    """

    distance: np.ndarray
    angle: np.ndarray
    evaluable: np.ndarray
    rings_used: int


def _ring_rows_cols(level_csr):
    indptr, indices = level_csr.indptr, level_csr.indices
    rows = np.repeat(np.arange(level_csr.shape[0]), np.diff(indptr))
    return rows, indices


def _harmonic_by_row(rows, values, n):
    """Row-wise harmonic mean; rows with a zero value or no entries give 0."""
    counts = np.bincount(rows, minlength=n).astype(np.float64)
    with np.errstate(divide="ignore"):
        inv_sum = np.bincount(rows, weights=1.0 / values, minlength=n)
    with np.errstate(invalid="ignore"):
        out = np.where(counts > 0.0, counts / inv_sum, 0.0)
    return out


def _ring_terms(mesh, normals, rings, depth, per_ring):
    """Sum harmonic ring means of a per-neighbor quantity over rings 1..depth."""
    if rings.depth < depth:
        raise ValueError(f"need {depth} rings, only {rings.depth} computed")
    n = mesh.vertex_count
    ok = ~normals.degenerate
    acc = np.zeros(n)
    for k in range(depth):
        rows, cols = _ring_rows_cols(rings.levels[k])
        # Degenerate vertices are dropped both as centers and as neighbors:
        # they have no normal to measure against.
        keep = ok[rows] & ok[cols]
        rows, cols = rows[keep], cols[keep]
        acc += _harmonic_by_row(rows, per_ring(rows, cols), n)
    acc[~ok] = np.nan
    return acc


def distance_measure(
    mesh: Mesh, normals: NormalField, rings: RingNeighborhoods, depth: int
) -> np.ndarray:
    """Summed harmonic tangent-plane distance over the first ``depth`` rings."""

    def offsets(rows, cols):
        diff = mesh.vertices[cols] - mesh.vertices[rows]
        return np.abs(np.einsum("ij,ij->i", normals.vectors[rows], diff))

    return _ring_terms(mesh, normals, rings, depth, offsets)


def angle_measure(
    mesh: Mesh, normals: NormalField, rings: RingNeighborhoods, depth: int
) -> np.ndarray:
    """Summed harmonic normal angle over the first ``depth`` rings."""

    def angles(rows, cols):
        dots = np.einsum("ij,ij->i", normals.vectors[rows], normals.vectors[cols])
        return np.arccos(np.clip(dots, -1.0, 1.0))

    return _ring_terms(mesh, normals, rings, depth, angles)


def measure_field(
    mesh: Mesh, normals: NormalField, rings: RingNeighborhoods, depth: int
) -> MeasureField:
    """Both measures for one level, sharing the evaluable-vertex marker."""
    return MeasureField(
        distance=distance_measure(mesh, normals, rings, depth),
        angle=angle_measure(mesh, normals, rings, depth),
        evaluable=~normals.degenerate,
        rings_used=depth,
    )
