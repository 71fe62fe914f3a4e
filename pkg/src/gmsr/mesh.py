"""Triangle mesh container, OFF/OBJ parsing, normals and ring neighborhoods."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)


class MeshFormatError(ValueError):
    """Raised for malformed OFF/OBJ input; message carries the line number."""


def _fail(line_no: int, message: str) -> None:
    raise MeshFormatError(f"line {line_no}: {message}")


class Mesh:
    """Immutable triangle mesh: vertex positions, faces and edge adjacency.

    Parameters
    ----------
    vertices : array_like
        (n, 3) float coordinates in model units.
    faces : array_like
        (m, 3) integer vertex indices. Each face must reference three
        distinct vertices in ``[0, n)``. An empty face list is allowed
        (point sets still have a bounding box).
    """

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        n = self.vertices.shape[0]
        if self.faces.size:
            if self.faces.min() < 0 or self.faces.max() >= n:
                raise ValueError("face index out of range")
            distinct = (
                (self.faces[:, 0] != self.faces[:, 1])
                & (self.faces[:, 1] != self.faces[:, 2])
                & (self.faces[:, 0] != self.faces[:, 2])
            )
            if not distinct.all():
                bad = int(np.flatnonzero(~distinct)[0])
                raise ValueError(f"face {bad} has repeated vertex indices")
        self.adjacency = self._build_adjacency()
        self._warn_on_inconsistent_winding()
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def face_count(self) -> int:
        return self.faces.shape[0]

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted 1-ring neighbor indices of vertex ``v``."""
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]

    def with_vertices(self, vertices: np.ndarray) -> "Mesh":
        """Same connectivity with replaced vertex positions."""
        return Mesh(vertices, self.faces)

    def _build_adjacency(self) -> sparse.csr_matrix:
        n = self.vertex_count
        if self.face_count == 0:
            return sparse.csr_matrix((n, n), dtype=np.int8)
        f = self.faces
        i = np.concatenate([f[:, 0], f[:, 1], f[:, 2], f[:, 1], f[:, 2], f[:, 0]])
        j = np.concatenate([f[:, 1], f[:, 2], f[:, 0], f[:, 0], f[:, 1], f[:, 2]])
        a = sparse.csr_matrix(
            (np.ones(i.shape[0], dtype=np.int8), (i, j)), shape=(n, n)
        )
        a.data[:] = 1  # collapse duplicate edge entries
        a.sort_indices()
        return a

    def _warn_on_inconsistent_winding(self) -> None:
        if self.face_count == 0:
            return
        f = self.faces
        n = self.vertex_count
        directed = np.concatenate(
            [f[:, 0] * n + f[:, 1], f[:, 1] * n + f[:, 2], f[:, 2] * n + f[:, 0]]
        )
        _, counts = np.unique(directed, return_counts=True)
        dup = int((counts > 1).sum())
        if dup:
            logger.warning(
                "mesh has %d directed edge(s) shared by multiple faces; "
                "adjacent face windings disagree or the mesh is non-manifold",
                dup,
            )


@dataclass(frozen=True)
class NormalField:
    """Per-vertex unit normals plus the vertices where none could be computed.

    ``vectors`` holds NaN rows for degenerate vertices (no incident face, or
    incident face normals cancelling exactly); ``degenerate`` marks them.
    """

    vectors: np.ndarray
    degenerate: np.ndarray

    @property
    def flagged(self) -> np.ndarray:
        """Sorted indices of vertices without a usable normal."""
        return np.flatnonzero(self.degenerate)


def compute_vertex_normals(mesh: Mesh) -> NormalField:
    """Area-weighted average of incident face normals, unit length.

    The cross product of two face edges has magnitude twice the face area,
    so summing raw cross products per vertex is exactly the area weighting.
    """
    n = mesh.vertex_count
    acc = np.zeros((n, 3))
    if mesh.face_count:
        f = mesh.faces
        p = mesh.vertices
        cross = np.cross(p[f[:, 1]] - p[f[:, 0]], p[f[:, 2]] - p[f[:, 0]])
        idx = f.ravel()
        rep = np.repeat(cross, 3, axis=0)
        for c in range(3):
            acc[:, c] = np.bincount(idx, weights=rep[:, c], minlength=n)
    norms = np.linalg.norm(acc, axis=1)
    incident = np.zeros(n, dtype=bool)
    if mesh.face_count:
        incident[mesh.faces.ravel()] = True
    degenerate = (~incident) | (norms == 0.0)
    vectors = np.full((n, 3), np.nan)
    ok = ~degenerate
    vectors[ok] = acc[ok] / norms[ok, None]
    vectors.setflags(write=False)
    degenerate.setflags(write=False)
    return NormalField(vectors=vectors, degenerate=degenerate)


@dataclass(frozen=True)
class RingNeighborhoods:
    """Breadth-first vertex layers: ring k holds vertices at graph distance k.

    ``levels[k-1]`` is an (n, n) CSR boolean matrix whose row v flags the
    vertices exactly k edges away from v. Layers are pairwise disjoint and
    never contain v itself.
    """

    levels: list = field(repr=False)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def ring(self, v: int, k: int) -> np.ndarray:
        """Sorted vertex indices at graph distance exactly ``k`` from ``v``."""
        m = self.levels[k - 1]
        return m.indices[m.indptr[v]:m.indptr[v + 1]]

    def ring_sizes(self, v: int) -> np.ndarray:
        """Ring populations for v, one entry per depth."""
        return np.array([m.indptr[v + 1] - m.indptr[v] for m in self.levels])

    def union_csr(self, upto: int) -> sparse.csr_matrix:
        """Row-wise union of rings 1..upto as a CSR boolean matrix."""
        if upto < 1 or upto > self.depth:
            raise ValueError(f"ring depth {upto} outside [1, {self.depth}]")
        total = self.levels[0].astype(np.int8)
        for m in self.levels[1:upto]:
            total = total + m.astype(np.int8)
        total = total.tocsr()
        total.sort_indices()
        return total


def ring_levels(adjacency: sparse.csr_matrix, depth: int) -> list:
    """Breadth-first layers for every vertex at once over an adjacency matrix.

    Level k is obtained by expanding level k-1 one edge and discarding every
    vertex already reached, which keeps layers disjoint and graph-exact.
    """
    if depth < 1:
        raise ValueError("ring depth must be >= 1")
    n = adjacency.shape[0]
    adj = adjacency.astype(np.int64).tocsr()
    current = adj.copy()
    current.sort_indices()
    reached = (adj + sparse.identity(n, dtype=np.int64, format="csr")).astype(bool)
    levels = [current.astype(bool)]
    for _ in range(depth - 1):
        grown = current @ adj
        grown.data[:] = 1
        overlap = grown.multiply(reached).astype(np.int64)
        nxt = (grown - overlap).tocsr()
        nxt.eliminate_zeros()
        nxt.sort_indices()
        reached = (reached + nxt.astype(bool)).tocsr()
        levels.append(nxt.astype(bool))
        current = nxt
    for m in levels:
        m.sort_indices()
    return levels


def k_rings(mesh: Mesh, depth: int) -> RingNeighborhoods:
    """Ring neighborhoods of every vertex up to ``depth`` rings.

    Rings truncate naturally on boundaries and small components: a ring may
    be empty once the component is exhausted.
    """
    return RingNeighborhoods(levels=ring_levels(mesh.adjacency, depth))


def bbox_diagonal(mesh: Mesh) -> float:
    """Length of the main diagonal of the axis-aligned bounding box."""
    if mesh.vertex_count == 0:
        raise ValueError("bounding box of an empty mesh is undefined")
    extent = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
    return float(np.linalg.norm(extent))


def _tokenize(text: str):
    """Yield (line_number, tokens) for non-blank lines, comments stripped."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield line_no, body.split()


def _parse_floats(tokens, count, line_no, what):
    try:
        return [float(t) for t in tokens[:count]]
    except ValueError:
        _fail(line_no, f"could not parse {what}: {' '.join(tokens)}")


def parse_off(text: str) -> Mesh:
    """Parse an ASCII OFF mesh (triangles only).

    The header may carry the counts on the same line. Extra per-line fields
    (vertex or face colors) are tolerated and ignored.
    """
    lines = _tokenize(text)
    try:
        line_no, tokens = next(lines)
    except StopIteration:
        raise MeshFormatError("line 1: empty OFF input") from None
    if tokens[0] != "OFF":
        _fail(line_no, f"expected OFF header, found {tokens[0]!r}")
    counts = tokens[1:]
    if not counts:
        try:
            line_no, counts = next(lines)
        except StopIteration:
            _fail(line_no, "missing OFF count line")
    if len(counts) < 2:
        _fail(line_no, "OFF count line needs vertex and face counts")
    try:
        n_vertices, n_faces = int(counts[0]), int(counts[1])
    except ValueError:
        _fail(line_no, f"could not parse OFF counts: {' '.join(counts)}")

    vertices = []
    for _ in range(n_vertices):
        try:
            line_no, tokens = next(lines)
        except StopIteration:
            raise MeshFormatError(
                f"line {line_no}: vertex count mismatch, expected "
                f"{n_vertices} vertices, found {len(vertices)}"
            ) from None
        if len(tokens) < 3:
            _fail(line_no, "vertex line needs 3 coordinates")
        vertices.append(_parse_floats(tokens, 3, line_no, "vertex coordinates"))

    faces = []
    for _ in range(n_faces):
        try:
            line_no, tokens = next(lines)
        except StopIteration:
            raise MeshFormatError(
                f"line {line_no}: face count mismatch, expected "
                f"{n_faces} faces, found {len(faces)}"
            ) from None
        try:
            arity = int(tokens[0])
        except ValueError:
            _fail(line_no, f"could not parse face arity: {tokens[0]}")
        if arity != 3:
            _fail(line_no, f"non-triangular face with {arity} vertices")
        if len(tokens) < 4:
            _fail(line_no, "face line needs 3 vertex indices")
        try:
            idx = [int(t) for t in tokens[1:4]]
        except ValueError:
            _fail(line_no, f"could not parse face indices: {' '.join(tokens[1:4])}")
        for v in idx:
            if v < 0 or v >= n_vertices:
                _fail(line_no, f"face index {v} out of range [0, {n_vertices})")
        faces.append(idx)

    for line_no, tokens in lines:
        _fail(line_no, "unexpected content after declared vertices and faces")

    return Mesh(
        np.array(vertices, dtype=np.float64).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
    )


def parse_obj(text: str) -> Mesh:
    """Parse a Wavefront OBJ mesh (``v``/``f`` records, triangles only).

    Indices are 1-based; negative indices count back from the vertices
    defined so far, per the format convention. Texture and normal record
    types are ignored.
    """
    vertices = []
    faces = []
    for line_no, tokens in _tokenize(text):
        key = tokens[0]
        if key == "v":
            if len(tokens) < 4:
                _fail(line_no, "vertex record needs 3 coordinates")
            vertices.append(_parse_floats(tokens[1:], 3, line_no, "vertex coordinates"))
        elif key == "f":
            refs = tokens[1:]
            if len(refs) != 3:
                _fail(line_no, f"non-triangular face with {len(refs)} vertices")
            idx = []
            for ref in refs:
                head = ref.split("/")[0]
                try:
                    raw = int(head)
                except ValueError:
                    _fail(line_no, f"could not parse face index: {ref}")
                if raw == 0:
                    _fail(line_no, "face index 0 is not valid in OBJ")
                resolved = raw - 1 if raw > 0 else len(vertices) + raw
                if resolved < 0 or resolved >= len(vertices):
                    _fail(line_no, f"face index {raw} out of range")
                idx.append(resolved)
            faces.append(idx)
        # all other record types (vn, vt, o, g, s, usemtl, ...) carry no geometry
    return Mesh(
        np.array(vertices, dtype=np.float64).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
    )


def write_off(mesh: Mesh) -> str:
    """Canonical OFF serialization; re-parsing reproduces the mesh exactly.

    Coordinates use Python's shortest round-trip float representation.
    """
    out = ["OFF", f"{mesh.vertex_count} {mesh.face_count} 0"]
    for x, y, z in mesh.vertices:
        out.append(f"{float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.faces:
        out.append(f"3 {a} {b} {c}")
    return "\n".join(out) + "\n"
