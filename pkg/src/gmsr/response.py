"""Saliency response: per-scale normalization, multi-scale product, NMS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import RingNeighborhoods


def _min_max_normalize(values: np.ndarray, evaluable: np.ndarray) -> np.ndarray:
    """Min-max over evaluable vertices; a constant field normalizes to zero.

    A degenerate range carries no saliency information, so the whole term is
    defined as 0 rather than dividing by zero.
    """
    out = np.zeros_like(values, dtype=np.float64)
    if not evaluable.any():
        return out
    pool = values[evaluable]
    lo = pool.min()
    hi = pool.max()
    if hi == lo:
        return out
    out[evaluable] = (pool - lo) / (hi - lo)
    return out


def per_scale_response(
    distance: np.ndarray,
    angle: np.ndarray,
    alpha: float,
    evaluable: np.ndarray | None = None,
) -> np.ndarray:
    """Weighted sum of the min-max normalized measures for one scale.

    Vertices outside the evaluable set score 0 and are excluded from the
    normalization statistics.
    """
    distance = np.asarray(distance, dtype=np.float64)
    angle = np.asarray(angle, dtype=np.float64)
    if distance.shape != angle.shape:
        raise ValueError("measure fields must cover the same vertex set")
    if distance.size == 0:
        raise ValueError("measure fields are empty")
    if evaluable is None:
        evaluable = np.ones(distance.shape, dtype=bool)
    return _min_max_normalize(distance, evaluable) + alpha * _min_max_normalize(
        angle, evaluable
    )


def final_response(per_scale_fields) -> np.ndarray:
    """Elementwise product of the per-scale responses.

    A zero at any scale suppresses the vertex outright: saliency must repeat
    across scales to survive.
    """
    fields = [np.asarray(f, dtype=np.float64) for f in per_scale_fields]
    if not fields:
        raise ValueError("at least one per-scale response is required")
    out = fields[0].copy()
    for f in fields[1:]:
        if f.shape != out.shape:
            raise ValueError("per-scale responses must cover the same vertex set")
        out *= f
    return out


@dataclass(frozen=True)
class ResponseField:
    """Per-scale and combined saliency values for every vertex."""

    per_scale: dict
    combined: np.ndarray
    alpha: float
    nms_rings: int


@dataclass(frozen=True)
class CandidateSet:
    """Local-maximum vertices, strongest first.

    ``indices`` are unique vertex ids; ``values`` the matching combined
    response, all strictly positive, sorted descending (ties by index).
    """

    indices: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def as_pairs(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))


def _row_max(union_csr, values: np.ndarray) -> np.ndarray:
    """Per-row maximum of values over CSR column sets; empty rows give -inf."""
    n = union_csr.shape[0]
    entries = values[union_csr.indices]
    padded = np.append(entries, -np.inf)  # sentinel keeps reduceat in range
    starts = np.minimum(union_csr.indptr[:-1], entries.shape[0])
    out = np.maximum.reduceat(padded, starts) if n else np.empty(0)
    out[np.diff(union_csr.indptr) == 0] = -np.inf
    return out


def non_maxima_suppression(
    rings: RingNeighborhoods, response: np.ndarray, nms_rings: int
) -> CandidateSet:
    """Keep vertices strictly greater than everything in their ring union.

    A vertex survives only if its response is positive and strictly exceeds
    the response of every vertex within graph distance ``nms_rings``; exact
    plateau ties eliminate each other.
    """
    response = np.asarray(response, dtype=np.float64)
    union = rings.union_csr(nms_rings)
    neighborhood_max = _row_max(union, response)
    keep = (response > neighborhood_max) & (response > 0.0)
    idx = np.flatnonzero(keep)
    vals = response[idx]
    order = np.lexsort((idx, -vals))
    return CandidateSet(indices=idx[order], values=vals[order])
