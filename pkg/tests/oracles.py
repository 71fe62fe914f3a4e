"""Independent reference implementations the library is checked against.

Deliberately written in plain Python / textbook NumPy, structured
differently from the library code paths they certify.
"""

import numpy as np


def bfs_rings(neighbors_of, n_vertices, depth):
    """Breadth-first layers per vertex: rings[v][k-1] = set at distance k.

    ``neighbors_of`` is a callable returning an iterable of neighbor
    indices.
    """
    all_rings = []
    for v in range(n_vertices):
        seen = {v}
        frontier = {v}
        rings_v = []
        for _ in range(depth):
            nxt = set()
            for u in frontier:
                for w in neighbors_of(u):
                    if w not in seen:
                        nxt.add(w)
            seen |= nxt
            rings_v.append(nxt)
            frontier = nxt
        all_rings.append(rings_v)
    return all_rings


def floyd_warshall(weights):
    """All-pairs shortest paths; weights is a dense matrix with np.inf
    for missing edges and zeros on the diagonal."""
    dist = np.array(weights, dtype=np.float64)
    n = dist.shape[0]
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def dense_edge_weights(mesh):
    """Dense Euclidean edge-length matrix for floyd_warshall."""
    n = mesh.vertex_count
    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    for a, b, c in mesh.faces:
        for u, v in ((a, b), (b, c), (a, c)):
            length = float(np.linalg.norm(mesh.vertices[u] - mesh.vertices[v]))
            weights[u, v] = length
            weights[v, u] = length
    return weights


def brute_force_nms(mesh, values, depth):
    """Literal reading of ring suppression: keep v iff its value strictly
    exceeds every value in rings 1..depth and is positive."""
    rings = bfs_rings(lambda u: mesh.neighbors(u).tolist(), mesh.vertex_count, depth)
    kept = []
    for v in range(mesh.vertex_count):
        if values[v] <= 0.0:
            continue
        neighborhood = set().union(*rings[v]) if rings[v] else set()
        if all(values[v] > values[u] for u in neighborhood):
            kept.append(v)
    return sorted(kept)


def arithmetic_mean(values):
    return float(np.mean(values))


def geometric_mean(values):
    values = np.asarray(values, dtype=np.float64)
    return float(np.exp(np.mean(np.log(values))))


def quadratic_mean(values):
    values = np.asarray(values, dtype=np.float64)
    return float(np.sqrt(np.mean(values * values)))


def harmonic_mean_reference(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0 or np.any(values == 0.0):
        return 0.0
    return float(values.size / np.sum(1.0 / values))


def ring_distance_sums(mesh, normals, depth, mean):
    """Per-vertex sum over rings of ``mean`` applied to tangent-plane
    distances, skipping degenerate vertices as centers and as neighbors.
    Plain-python mirror of the production measure for small meshes."""
    rings = bfs_rings(lambda u: mesh.neighbors(u).tolist(), mesh.vertex_count, depth)
    ok = ~normals.degenerate
    out = np.full(mesh.vertex_count, np.nan)
    for v in range(mesh.vertex_count):
        if not ok[v]:
            continue
        total = 0.0
        for ring in rings[v]:
            ds = [
                abs(
                    float(
                        np.dot(
                            normals.vectors[v],
                            mesh.vertices[u] - mesh.vertices[v],
                        )
                    )
                )
                for u in sorted(ring)
                if ok[u]
            ]
            if ds:
                total += mean(ds)
        out[v] = total
    return out
