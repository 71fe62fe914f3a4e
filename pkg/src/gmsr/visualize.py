"""Colored-mesh export of a per-vertex response field."""

from __future__ import annotations

import numpy as np

from .mesh import Mesh


def saliency_ply(mesh: Mesh, values: np.ndarray) -> str:
    """ASCII PLY of the mesh with ``values`` mapped to vertex colors.

    Values are min-max normalized to t in [0, 1] and sent through a
    linear blue-to-red ramp: red = round(255 t), green = 0,
    blue = 255 - red. A constant field normalizes to t = 0 (uniform
    blue). The ramp is restated in a comment line of the output so the
    file is self-describing.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (mesh.vertex_count,):
        raise ValueError("need exactly one value per vertex")
    lo = values.min() if values.size else 0.0
    hi = values.max() if values.size else 0.0
    if hi > lo:
        t = (values - lo) / (hi - lo)
    else:
        t = np.zeros_like(values)
    red = np.rint(255.0 * t).astype(np.int64)
    blue = 255 - red

    lines = [
        "ply",
        "format ascii 1.0",
        "comment saliency ramp: blue (low) to red (high); "
        "red=round(255*t), green=0, blue=255-red",
        f"element vertex {mesh.vertex_count}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        f"element face {mesh.face_count}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for (x, y, z), r, b in zip(mesh.vertices, red, blue):
        lines.append(f"{float(x)!r} {float(y)!r} {float(z)!r} {r} 0 {b}")
    for a, b, c in mesh.faces:
        lines.append(f"3 {a} {b} {c}")
    return "\n".join(lines) + "\n"
