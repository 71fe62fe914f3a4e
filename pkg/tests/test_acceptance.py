"""Top-level acceptance gate: one test per shipped guarantee.

Each test states a user-visible contract of the toolkit and checks it
end to end, mostly against independent brute-force implementations from
``oracles``. Run with ``pytest -v tests/test_acceptance.py`` for one
pass/fail line per guarantee.
"""

import os
import time

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

import geometry
import oracles
from gmsr import (
    CandidateSet,
    DetectorConfig,
    MatchResult,
    Mesh,
    aggregate,
    brute_force_refine,
    build_scale_stack,
    compute_vertex_normals,
    detect,
    evaluate_detections,
    f1,
    final_response,
    geodesic_distances,
    harmonic_mean,
    iou,
    k_rings,
    measure_field,
    non_maxima_suppression,
    parse_ground_truth,
    per_scale_response,
    sparse_refine,
)


def test_sparse_refinement_is_exactly_optimal():
    """Thresholding solves the kept-count-plus-squared-loss problem exactly:
    it matches exhaustive search on 1,000 random instances in under 5 s."""
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    for _ in range(1000):
        c = int(rng.integers(1, 16))
        values = rng.random(c) * 5.0
        beta = float(rng.random())
        candidates = CandidateSet(
            indices=np.arange(c, dtype=np.int64), values=values
        )
        fast = sparse_refine(candidates, beta)
        slow = brute_force_refine(candidates, beta)
        assert set(fast.indices.tolist()) == set(slow.indices.tolist())
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"1,000 refinement instances took {elapsed:.2f}s"


def test_harmonic_mean_is_the_most_conservative_mean():
    """harmonic <= geometric <= arithmetic <= quadratic on 10,000 random
    positive vectors, and the wedge fixture's ridge scores strictly lower
    harmonically than arithmetically."""
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        values = rng.random(int(rng.integers(1, 12))) * 10.0 + 1e-9
        h = harmonic_mean(values)
        g = oracles.geometric_mean(values)
        a = oracles.arithmetic_mean(values)
        q = oracles.quadratic_mean(values)
        slack = 1e-12 * max(q, 1.0)
        assert h <= g + slack
        assert g <= a + slack
        assert a <= q + slack

    tent = geometry.tent_mesh()
    normals = compute_vertex_normals(tent)
    rings = k_rings(tent, 1)
    harmonic_field = measure_field(tent, normals, rings, 1).distance
    arithmetic_field = oracles.ring_distance_sums(
        tent, normals, 1, oracles.arithmetic_mean
    )
    ridge = 1  # mid-ridge vertex: two neighbors lie in its tangent plane
    assert harmonic_field[ridge] == 0.0
    assert harmonic_field[ridge] < arithmetic_field[ridge]


def test_suppression_matches_brute_force_enumeration():
    """Ring-based non-maxima suppression equals literal per-vertex
    enumeration on 100 random response fields over a 200-vertex mesh."""
    mesh = geometry.uv_sphere(12, 18)
    assert mesh.vertex_count == 200
    rng = np.random.default_rng(11)
    depths = [1, 2, 3, 5, 10]
    rings = {d: k_rings(mesh, d) for d in depths}
    for i in range(100):
        depth = depths[i % len(depths)]
        field = rng.random(mesh.vertex_count)
        field[rng.random(mesh.vertex_count) < 0.2] = 0.0
        got = non_maxima_suppression(rings[depth], field, depth)
        want = oracles.brute_force_nms(mesh, field, depth)
        assert sorted(got.indices.tolist()) == want


def test_geodesics_match_floyd_warshall():
    """Sparse Dijkstra distances agree with a dense Floyd-Warshall
    all-pairs solver to 1e-9 on every fixture up to 200 vertices."""
    fixtures = [
        geometry.octahedron(),
        geometry.unit_cube8(),
        geometry.icosahedron(),
        geometry.grid_patch(6, noise=0.05, seed=13),
        geometry.tent_mesh(),
        geometry.uv_sphere(12, 18),
    ]
    for mesh in fixtures:
        assert mesh.vertex_count <= 200
        want = oracles.floyd_warshall(oracles.dense_edge_weights(mesh))
        got = geodesic_distances(mesh, np.arange(mesh.vertex_count))
        assert np.abs(got - want).max() <= 1e-9


def test_default_detector_finds_exactly_the_cube_corners():
    """On a 16x16-per-side subdivided unit cube the default configuration
    returns the 8 corner vertices and nothing else, in under 10 s."""
    mesh = geometry.subdivided_cube(16)
    corners = set(geometry.cube_corner_ids(mesh))
    start = time.perf_counter()
    result = detect(mesh)
    elapsed = time.perf_counter() - start

    detected = set(result.points.indices.tolist())
    union = k_rings(mesh, 1).union_csr(1)
    near_corner = set(corners)
    for c in corners:
        near_corner.update(union.indices[union.indptr[c] : union.indptr[c + 1]])

    assert len(detected) == 8
    assert detected <= near_corner, "detections off the corners"
    assert detected == corners  # stronger: exact corner vertices
    assert elapsed < 10.0, f"detection took {elapsed:.2f}s"


def test_detections_survive_rigid_motion_and_uniform_scaling():
    """Rigid motion keeps the detected vertex set identical; uniform
    scaling keeps it identical and moves per-scale responses by no more
    than 1e-6 of the field's magnitude."""
    mesh = geometry.subdivided_cube(16)
    base = detect(mesh)
    base_points = sorted(base.points.indices.tolist())

    rotation = Rotation.from_euler("xyz", [31.0, -12.0, 77.0], degrees=True)
    moved = Mesh(
        rotation.apply(mesh.vertices) + np.array([2.0, -5.0, 0.25]), mesh.faces
    )
    rigid = detect(moved)
    assert sorted(rigid.points.indices.tolist()) == base_points

    scaled = detect(Mesh(mesh.vertices * 17.3, mesh.faces))
    assert sorted(scaled.points.indices.tolist()) == base_points
    for multiplier, field in base.response.per_scale.items():
        other = scaled.response.per_scale[multiplier]
        deviation = np.abs(field - other).max()
        assert deviation <= 1e-6 * np.abs(field).max()


def test_score_identities_hold():
    """F1 = 2*IOU/(1+IOU) on 1,000 random TP/FP/FN triples, to 1e-12."""
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 1000:
        tp, fp, fn = (int(x) for x in rng.integers(0, 50, size=3))
        if tp + fp + fn == 0:
            continue
        m = MatchResult(r=0.1, n_gt=tp + fn, n_detected=tp + fp, n_correct=tp)
        i = iou(m)
        s = f1(m)
        assert abs(s - 2.0 * i / (1.0 + i)) <= 1e-12
        checked += 1


@pytest.mark.skipif(
    "GMSR_BENCHMARK_DIR" not in os.environ,
    reason="public benchmark dataset not available (set GMSR_BENCHMARK_DIR); "
    "its published grid averages cannot be checked, and the annotation "
    "radius normalization is unresolved, so the property and fixture "
    "suite above stands as the acceptance gate",
)
def test_published_benchmark_grid_averages():
    """Full-grid average IOU/F1 on the public annotated datasets falls
    within +/-0.05 of the published values (0.3216/0.4334 on dataset A,
    0.2706 IOU on dataset B)."""
    from test_benchmark_dataset import run_full_grid  # gated import

    scores = run_full_grid(os.environ["GMSR_BENCHMARK_DIR"])
    assert abs(scores["A"]["iou"] - 0.3216) <= 0.05
    assert abs(scores["A"]["f1"] - 0.4334) <= 0.05
    assert abs(scores["B"]["iou"] - 0.2706) <= 0.05


def test_measure_depth_peaks_interior_and_both_terms_help():
    """On noisy cubes the ring-depth sweep of mean IOU peaks strictly
    inside the sweep range, and the default weighted combination of both
    measures beats the distance-only and angle-only variants."""
    meshes, gt_entries = geometry.corner_benchmark()
    gt_text = "\n".join(
        f"{name} {n} {sigma} " + " ".join(str(v) for v in idx)
        for (name, n, sigma), idx in gt_entries.items()
    )
    ground_truth = parse_ground_truth(gt_text)
    r_values = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06]

    def mean_iou_for(detections):
        report = evaluate_detections(meshes, ground_truth, detections, r_values)
        return report.summary.mean_iou

    # ring-depth sweep with the full default pipeline
    sweep = {}
    for rings in range(1, 11):
        config = DetectorConfig(rings=rings)
        detections = {
            name: detect(mesh, config).points.indices.tolist()
            for name, mesh in meshes.items()
        }
        sweep[rings] = mean_iou_for(detections)
    best = max(sweep, key=sweep.get)
    assert 1 < best < 10, f"ring sweep peaked at the boundary: {sweep}"

    # measure ablation at the default depth, sharing the detector skeleton
    def detect_with_measures(mesh, combine):
        config = DetectorConfig()
        rings = k_rings(mesh, max(config.rings, config.nms_rings))
        stack = build_scale_stack(mesh, config.scales)
        fields = []
        for level in stack.levels:
            mf = measure_field(level.mesh, level.normals, rings, config.rings)
            fields.append(combine(mf))
        combined = final_response(fields)
        candidates = non_maxima_suppression(rings, combined, config.nms_rings)
        return sparse_refine(candidates, config.beta).indices.tolist()

    variants = {
        "combined": lambda mf: per_scale_response(
            mf.distance, mf.angle, 2.5, mf.evaluable
        ),
        "distance_only": lambda mf: per_scale_response(
            mf.distance, mf.angle, 0.0, mf.evaluable
        ),
        "angle_only": lambda mf: per_scale_response(
            mf.angle, mf.angle, 0.0, mf.evaluable
        ),
    }
    scores = {
        name: mean_iou_for(
            {m: detect_with_measures(mesh, combine) for m, mesh in meshes.items()}
        )
        for name, combine in variants.items()
    }
    assert scores["combined"] > scores["distance_only"], scores
    assert scores["combined"] > scores["angle_only"], scores
