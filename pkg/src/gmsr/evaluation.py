"""Benchmark evaluation: geodesic matching of detections against ground truth.

Ground truth is a set of annotated vertex indices per (model, n, sigma)
cell, where n is the subject-count threshold and sigma the annotation
region radius. A detection certifies its nearest ground-truth point when
their geodesic distance is within the tolerance r; counts are scored with
intersection-over-union and F1 and averaged over the (n, sigma, r) grid.

Before any matching the mesh is rescaled so its bounding-box main
diagonal is 1; sigma and r are interpreted in those units. Geodesic
distance means shortest path over the edge graph with Euclidean edge
lengths, which is within a small constant of the surface distance on
meshes of benchmark density and far below the r grid (r >= 0.005).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .mesh import Mesh, bbox_diagonal

logger = logging.getLogger(__name__)


class GroundTruthFormatError(ValueError):
    """Malformed ground-truth text."""


class UndefinedScoreError(ValueError):
    """Score requested for a cell with no ground-truth and no detected points."""


# ---------------------------------------------------------------------------
# ground truth


@dataclass(frozen=True)
class GroundTruthSet:
    """Annotated vertex indices keyed by (model id, n, sigma).

    Index arrays are sorted and duplicate-free. ``warnings`` collects
    data-quality findings from parsing (duplicates, merged records,
    count monotonicity violations); external data never hard-fails on
    those.
    """

    entries: dict
    warnings: tuple = ()

    def models(self) -> list:
        return sorted({model for model, _, _ in self.entries})

    def cells_for(self, model: str, n_values=None, sigma_values=None) -> list:
        """Keys for one model, optionally filtered, in (n, sigma) order."""
        n_wanted = None if n_values is None else {int(n) for n in n_values}
        s_wanted = None if sigma_values is None else {float(s) for s in sigma_values}
        keys = [
            key
            for key in self.entries
            if key[0] == model
            and (n_wanted is None or key[1] in n_wanted)
            and (s_wanted is None or key[2] in s_wanted)
        ]
        return sorted(keys, key=lambda key: (key[1], key[2]))


def parse_ground_truth(text: str, source: str = "<string>") -> GroundTruthSet:
    """Parse ground-truth records, one per line.

    Format: ``model n sigma [index ...]`` — whitespace separated, ``#``
    starts a comment, blank lines are ignored. The index list may be
    empty. Duplicate indices and repeated (model, n, sigma) records are
    merged with a warning, as is any violation of the expected
    count-nonincreasing-in-n shape.
    """
    entries: dict = {}
    warnings: list = []

    def fail(line_no: int, message: str):
        raise GroundTruthFormatError(f"{source}, line {line_no}: {message}")

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 3:
            fail(line_no, "expected 'model n sigma [index ...]'")
        model = tokens[0]
        try:
            n = int(tokens[1])
        except ValueError:
            fail(line_no, f"subject count must be an integer, got {tokens[1]!r}")
        if n < 1:
            fail(line_no, "subject count must be positive")
        try:
            sigma = float(tokens[2])
        except ValueError:
            fail(line_no, f"region radius must be a number, got {tokens[2]!r}")
        if not sigma > 0.0:
            fail(line_no, "region radius must be positive")
        try:
            raw_indices = [int(t) for t in tokens[3:]]
        except ValueError:
            fail(line_no, "vertex indices must be integers")
        if any(i < 0 for i in raw_indices):
            fail(line_no, "vertex indices must be nonnegative")
        indices = np.unique(np.asarray(raw_indices, dtype=np.int64))
        if indices.size < len(raw_indices):
            warnings.append(
                f"{model} n={n} sigma={sigma:g}: duplicate vertex indices removed"
            )
        key = (model, n, sigma)
        if key in entries:
            entries[key] = np.union1d(entries[key], indices)
            warnings.append(
                f"{model} n={n} sigma={sigma:g}: repeated record merged"
            )
        else:
            entries[key] = indices

    by_model_sigma: dict = {}
    for (model, n, sigma), indices in entries.items():
        by_model_sigma.setdefault((model, sigma), []).append((n, indices.size))
    for (model, sigma), pairs in sorted(by_model_sigma.items()):
        pairs.sort()
        for (n_a, c_a), (n_b, c_b) in zip(pairs, pairs[1:]):
            if c_b > c_a:
                warnings.append(
                    f"{model} sigma={sigma:g}: {c_b} points at n={n_b} "
                    f"exceed {c_a} at n={n_a}"
                )
    for message in warnings:
        logger.warning("ground truth: %s", message)
    return GroundTruthSet(entries=entries, warnings=tuple(warnings))


def load_ground_truth(path) -> GroundTruthSet:
    path = Path(path)
    return parse_ground_truth(path.read_text(), source=str(path))


# ---------------------------------------------------------------------------
# geodesic distances


def edge_length_graph(mesh: Mesh) -> sparse.csr_matrix:
    """Symmetric sparse matrix of Euclidean edge lengths.

    Exact zero lengths (coincident endpoints) are bumped to the smallest
    positive float so the edge is not dropped by sparse semantics.
    """
    adj = mesh.adjacency
    rows = np.repeat(np.arange(mesh.vertex_count), np.diff(adj.indptr))
    lengths = np.linalg.norm(
        mesh.vertices[rows] - mesh.vertices[adj.indices], axis=1
    )
    lengths = np.maximum(lengths, np.finfo(np.float64).tiny)
    return sparse.csr_matrix(
        (lengths, adj.indices.copy(), adj.indptr.copy()), shape=adj.shape
    )


def geodesic_distances(mesh: Mesh, source, graph: sparse.csr_matrix = None):
    """Shortest-path distance over the edge graph from ``source``.

    ``source`` may be a single vertex index (returns a length-n vector)
    or a sequence of indices (returns one row per source). Unreachable
    vertices get +inf. ``graph`` lets callers reuse a prebuilt
    edge-length matrix.
    """
    scalar = np.ndim(source) == 0
    src = np.atleast_1d(np.asarray(source, dtype=np.int64))
    if src.ndim != 1:
        raise ValueError("source must be an index or a flat list of indices")
    if src.size == 0:
        return np.empty((0, mesh.vertex_count), dtype=np.float64)
    if src.min() < 0 or src.max() >= mesh.vertex_count:
        raise ValueError("source vertex index out of range")
    if graph is None:
        graph = edge_length_graph(mesh)
    dist = dijkstra(graph, directed=True, indices=src)
    return dist[0] if scalar else dist


# ---------------------------------------------------------------------------
# matching and scores


@dataclass(frozen=True)
class MatchResult:
    """Counts from matching one detection set against one ground-truth set.

    ``n_correct`` is the number of ground-truth points certified by at
    least one detection; surplus detections near an already-certified
    point count as false positives through n_detected - n_correct.
    """

    r: float
    n_gt: int
    n_detected: int
    n_correct: int
    matched: tuple = ()

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError("tolerance must be nonnegative")
        if not 0 <= self.n_correct <= min(self.n_gt, self.n_detected):
            raise ValueError("correct count exceeds ground-truth or detection count")

    @property
    def tp(self) -> int:
        return self.n_correct

    @property
    def fp(self) -> int:
        return self.n_detected - self.n_correct

    @property
    def fn(self) -> int:
        return self.n_gt - self.n_correct


def match_points(
    gt, detected, r: float, mesh: Mesh = None, gt_distances: np.ndarray = None
) -> MatchResult:
    """Match detections to ground truth within geodesic tolerance ``r``.

    A ground-truth point g is certified when some detected point a has
    d(g, a) <= r and g is the ground-truth point nearest to a (distance
    ties break toward the lower vertex index). Both inputs are treated
    as sets. ``gt_distances`` may carry precomputed geodesic rows, one
    per sorted unique ground-truth index; otherwise ``mesh`` is required
    and the rows are computed here.
    """
    if r < 0.0:
        raise ValueError("tolerance must be nonnegative")
    gt = np.unique(np.asarray(gt, dtype=np.int64))
    detected = np.unique(np.asarray(detected, dtype=np.int64))
    n_g, n_a = gt.size, detected.size
    if n_g == 0 or n_a == 0:
        return MatchResult(r=r, n_gt=n_g, n_detected=n_a, n_correct=0)
    if gt_distances is None:
        if mesh is None:
            raise ValueError("either mesh or gt_distances is required")
        gt_distances = geodesic_distances(mesh, gt)
    gt_distances = np.asarray(gt_distances, dtype=np.float64)
    if gt_distances.shape[0] != n_g:
        raise ValueError("gt_distances rows must match the unique ground-truth points")
    cols = gt_distances[:, detected]
    # argmin returns the first minimum; rows are in ascending vertex order,
    # so distance ties resolve toward the lower ground-truth index.
    nearest = np.argmin(cols, axis=0)
    within = cols[nearest, np.arange(n_a)] <= r
    certified = np.unique(nearest[within])
    return MatchResult(
        r=r,
        n_gt=n_g,
        n_detected=n_a,
        n_correct=int(certified.size),
        matched=tuple(gt[certified].tolist()),
    )


def iou(m: MatchResult) -> float:
    """tp / (tp + fp + fn); undefined when every count is zero."""
    total = m.tp + m.fp + m.fn
    if total == 0:
        raise UndefinedScoreError("no ground-truth and no detected points")
    return m.tp / total


def f1(m: MatchResult) -> float:
    """2 tp / (2 tp + fp + fn); undefined when every count is zero."""
    total = 2 * m.tp + m.fp + m.fn
    if total == 0:
        raise UndefinedScoreError("no ground-truth and no detected points")
    return 2 * m.tp / total


# ---------------------------------------------------------------------------
# grid evaluation


@dataclass(frozen=True)
class CellScore:
    """Scores of one (model, n, sigma, r) grid cell; None marks undefined."""

    model: str
    n: int
    sigma: float
    r: float
    tp: int
    fp: int
    fn: int
    iou: float = None
    f1: float = None

    @property
    def defined(self) -> bool:
        return self.iou is not None


@dataclass(frozen=True)
class CurvePoint:
    """Mean scores over the defined cells sharing one grid coordinate."""

    value: float
    mean_iou: float
    mean_f1: float
    cells: int


@dataclass(frozen=True)
class Summary:
    mean_iou: float
    mean_f1: float
    cell_count: int
    defined_cell_count: int
    per_r: tuple
    per_n: tuple
    per_sigma: tuple


def _curve(cells, key) -> tuple:
    groups: dict = {}
    for cell in cells:
        groups.setdefault(key(cell), []).append(cell)
    points = []
    for value in sorted(groups):
        defined = [c for c in groups[value] if c.defined]
        points.append(
            CurvePoint(
                value=value,
                mean_iou=float(np.mean([c.iou for c in defined])) if defined else None,
                mean_f1=float(np.mean([c.f1 for c in defined])) if defined else None,
                cells=len(defined),
            )
        )
    return tuple(points)


def aggregate(cells) -> Summary:
    """Unweighted means over defined cells, plus per-r/n/sigma curves."""
    cells = list(cells)
    if not cells:
        raise ValueError("no cells to aggregate")
    defined = [c for c in cells if c.defined]
    return Summary(
        mean_iou=float(np.mean([c.iou for c in defined])) if defined else None,
        mean_f1=float(np.mean([c.f1 for c in defined])) if defined else None,
        cell_count=len(cells),
        defined_cell_count=len(defined),
        per_r=_curve(cells, lambda c: c.r),
        per_n=_curve(cells, lambda c: c.n),
        per_sigma=_curve(cells, lambda c: c.sigma),
    )


@dataclass(frozen=True)
class EvaluationReport:
    cells: tuple
    summary: Summary
    warnings: tuple


def evaluate_detections(
    meshes: dict,
    ground_truth: GroundTruthSet,
    detections: dict,
    r_values,
    n_values=None,
    sigma_values=None,
) -> EvaluationReport:
    """Score every available (model, n, sigma, r) cell.

    ``meshes`` maps model id to Mesh, ``detections`` maps model id to
    detected vertex indices. Models present in the ground truth but
    missing a mesh or a detection set are skipped with a warning, as are
    models with out-of-range indices. Geodesic rows are computed once
    per model for the union of its ground-truth points and shared across
    cells. IOU is checked to be nondecreasing in r per cell; violations
    are reported as warnings (they would indicate a matching bug).
    """
    r_vals = sorted({float(r) for r in r_values})
    if not r_vals:
        raise ValueError("at least one tolerance value is required")
    if r_vals[0] < 0.0:
        raise ValueError("tolerance values must be nonnegative")

    warnings = list(ground_truth.warnings)
    cells = []
    for model in ground_truth.models():
        keys = ground_truth.cells_for(model, n_values, sigma_values)
        if not keys:
            continue
        if model not in meshes:
            warnings.append(f"model '{model}': no mesh provided; skipped")
            continue
        if model not in detections:
            warnings.append(f"model '{model}': no detections provided; skipped")
            continue
        mesh = meshes[model]
        scaled = mesh.with_vertices(mesh.vertices / bbox_diagonal(mesh))
        detected = np.unique(np.asarray(list(detections[model]), dtype=np.int64))
        if detected.size and (
            detected.min() < 0 or detected.max() >= mesh.vertex_count
        ):
            warnings.append(
                f"model '{model}': detected vertex index out of range; skipped"
            )
            continue
        gt_union = np.unique(np.concatenate([ground_truth.entries[k] for k in keys]))
        if gt_union.size and gt_union.max() >= mesh.vertex_count:
            warnings.append(
                f"model '{model}': ground-truth vertex index out of range; skipped"
            )
            continue
        graph = edge_length_graph(scaled)
        union_rows = geodesic_distances(scaled, gt_union, graph=graph)
        row_of = {int(v): i for i, v in enumerate(gt_union)}

        for model_id, n, sigma in keys:
            gt_idx = ground_truth.entries[(model_id, n, sigma)]
            gt_rows = union_rows[[row_of[int(v)] for v in gt_idx]]
            scores = []
            for r in r_vals:
                m = match_points(gt_idx, detected, r, gt_distances=gt_rows)
                try:
                    cell_iou, cell_f1 = iou(m), f1(m)
                except UndefinedScoreError:
                    cell_iou = cell_f1 = None
                scores.append(
                    CellScore(
                        model=model,
                        n=n,
                        sigma=sigma,
                        r=r,
                        tp=m.tp,
                        fp=m.fp,
                        fn=m.fn,
                        iou=cell_iou,
                        f1=cell_f1,
                    )
                )
            defined = [c.iou for c in scores if c.defined]
            if any(b < a for a, b in zip(defined, defined[1:])):
                warnings.append(
                    f"model '{model}' n={n} sigma={sigma:g}: IOU decreased as the "
                    "tolerance grew; matching is suspect"
                )
            cells.extend(scores)

    for message in warnings[len(ground_truth.warnings):]:
        logger.warning("evaluation: %s", message)
    summary = aggregate(cells) if cells else None
    return EvaluationReport(
        cells=tuple(cells), summary=summary, warnings=tuple(warnings)
    )
