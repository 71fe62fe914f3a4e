"""Sparse selection of final interest points from NMS candidates.

Selection minimizes ``beta * |kept| + sum of squared dropped responses``
over binary keep/drop vectors. The objective is separable per candidate:
keeping j costs beta while dropping it costs response_j^2, so the exact
minimizer keeps exactly the candidates with response^2 > beta. The
exhaustive minimizer is kept alongside as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .response import CandidateSet

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class InterestPointSet:
    """Final detections: a subset of the candidates, strongest first."""

    indices: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def as_pairs(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class RefinementProblem:
    """One solved instance: responses, penalty, and the keep/drop vector."""

    values: np.ndarray
    beta: float
    keep: np.ndarray

    @property
    def selected_values(self) -> np.ndarray:
        """Responses with dropped entries zeroed out."""
        return self.values * self.keep

    @property
    def objective(self) -> float:
        return selection_objective(self.values, self.keep, self.beta)


def solve_refinement(values, beta: float) -> RefinementProblem:
    """Minimize ``beta * |kept| + ||dropped||^2`` over keep/drop vectors."""
    if beta < 0.0:
        raise ValueError("penalty must be nonnegative")
    values = np.asarray(values, dtype=np.float64)
    return RefinementProblem(values=values, beta=beta, keep=values * values > beta)


def selection_objective(values: np.ndarray, keep: np.ndarray, beta: float) -> float:
    """beta * number kept + squared norm of the dropped responses."""
    values = np.asarray(values, dtype=np.float64)
    keep = np.asarray(keep, dtype=bool)
    dropped = values[~keep]
    return float(beta * keep.sum() + np.dot(dropped, dropped))


def sparse_refine(candidates: CandidateSet, beta: float) -> InterestPointSet:
    """Keep candidates whose squared response strictly exceeds ``beta``.

    The boundary case response^2 == beta is excluded, consistent with
    preferring fewer points among equal-cost selections.
    """
    problem = solve_refinement(candidates.values, beta)
    return InterestPointSet(
        indices=candidates.indices[problem.keep],
        values=candidates.values[problem.keep],
    )


def brute_force_refine(candidates: CandidateSet, beta: float) -> InterestPointSet:
    """Exhaustive minimizer over all keep/drop assignments (test oracle).

    Ties on the objective break toward fewer kept points, then toward the
    first assignment in mask order. Only usable for small candidate sets.
    """
    if beta < 0.0:
        raise ValueError("penalty must be nonnegative")
    c = len(candidates)
    if c > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"{c} candidates exceed the exhaustive search limit {BRUTE_FORCE_LIMIT}"
        )
    if c == 0:
        return InterestPointSet(
            indices=candidates.indices.copy(), values=candidates.values.copy()
        )
    masks = np.arange(1 << c, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(c)) & 1
    kept_counts = bits.sum(axis=1)
    squared = candidates.values * candidates.values
    objective = beta * kept_counts + (1 - bits) @ squared
    best = objective.min()
    contenders = np.flatnonzero(objective == best)
    contenders = contenders[kept_counts[contenders] == kept_counts[contenders].min()]
    chosen = bits[contenders[0]].astype(bool)
    return InterestPointSet(
        indices=candidates.indices[chosen], values=candidates.values[chosen]
    )
