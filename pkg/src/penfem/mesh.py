"""Structured triangulations of rectangles and 1D intervals.

Meshes carry tagged boundary regions and support uniform red refinement,
which is all the convergence experiments need: a regular family of
partitions with mesh size halving per level.  Vertex indices are 0-based
everywhere, including the text file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse

from .errors import InvalidGeometryError
from .kernels import tri_geometry


class RegionTag(Enum):
    """Boundary region kinds: clamped, traction, and the two contact zones."""

    DIRICHLET = "DIR"
    NEUMANN = "NEU"
    CONTACT1 = "C1"
    CONTACT2 = "C2"


_TAG_FROM_NAME = {t.value: t for t in RegionTag}

SIDES = ("bottom", "right", "top", "left")


@dataclass(frozen=True)
class TriangulationLevel:
    """A conforming mesh level with tagged boundary.

    For 2D meshes ``triangles`` holds counterclockwise vertex triples and
    ``segments`` is empty; 1D interval meshes use ``segments`` and an empty
    triangle list.  Boundary entries are ordered vertex pairs with the domain
    on the left of the direction of travel; 1D boundary points are stored as
    degenerate pairs ``(i, i)``.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    segments: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: tuple[RegionTag, ...]
    level: int
    h: float
    dim: int

    def __post_init__(self):
        for arr in (self.vertices, self.triangles, self.segments, self.boundary_edges):
            arr.setflags(write=False)
        _validate(self)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def edges_of_region(self, tag: RegionTag) -> np.ndarray:
        idx = [i for i, t in enumerate(self.boundary_tags) if t is tag]
        return self.boundary_edges[idx]

    def region_length(self, tag: RegionTag) -> float:
        edges = self.edges_of_region(tag)
        if edges.size == 0:
            return 0.0
        if self.dim == 1:
            return float(edges.shape[0])  # counting measure on endpoints
        d = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def region_nodes(self, tag: RegionTag) -> np.ndarray:
        return np.unique(self.edges_of_region(tag).ravel())


def _validate(mesh: TriangulationLevel) -> None:
    if mesh.dim not in (1, 2):
        raise InvalidGeometryError(f"unsupported dimension {mesh.dim}")
    if len(mesh.boundary_tags) != mesh.boundary_edges.shape[0]:
        raise InvalidGeometryError("boundary tag count does not match edge count")
    if mesh.dim == 2:
        if mesh.triangles.shape[0] == 0:
            raise InvalidGeometryError("2D mesh with no triangles")
        area, _ = tri_geometry(mesh.vertices, mesh.triangles)
        if np.any(area <= 0.0):
            raise InvalidGeometryError("triangle with non-positive signed area")
        edge_count: dict[tuple[int, int], int] = {}
        for tri in mesh.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                edge_count[key] = edge_count.get(key, 0) + 1
        if any(c > 2 for c in edge_count.values()):
            raise InvalidGeometryError("non-conforming mesh: edge shared by >2 triangles")
        hull = {k for k, c in edge_count.items() if c == 1}
        tagged = {
            (min(a, b), max(a, b)) for a, b in map(tuple, mesh.boundary_edges)
        }
        if hull != tagged:
            raise InvalidGeometryError("boundary edges do not cover the mesh hull")
        lengths = np.hypot(
            *(mesh.vertices[mesh.triangles[:, [1, 2, 0]]] - mesh.vertices[mesh.triangles]).transpose(2, 0, 1)
        )
        hmax = float(lengths.max())
    else:
        if mesh.segments.shape[0] == 0:
            raise InvalidGeometryError("1D mesh with no segments")
        lens = mesh.vertices[mesh.segments[:, 1], 0] - mesh.vertices[mesh.segments[:, 0], 0]
        if np.any(lens <= 0.0):
            raise InvalidGeometryError("1D element with non-positive length")
        if np.any(mesh.boundary_edges[:, 0] != mesh.boundary_edges[:, 1]):
            raise InvalidGeometryError("1D boundary entries must be degenerate pairs")
        hmax = float(lens.max())
    if abs(mesh.h - hmax) > 1e-12 * max(1.0, hmax):
        raise InvalidGeometryError(f"stored h={mesh.h} disagrees with geometry ({hmax})")
    if all(t is not RegionTag.DIRICHLET for t in mesh.boundary_tags):
        raise InvalidGeometryError("mesh needs a clamped region of positive measure")


def build_rectangle_mesh(
    width: float,
    height: float,
    nx: int,
    ny: int,
    tagging: dict[str, RegionTag],
) -> TriangulationLevel:
    """Structured triangulation of ``(0,width) x (0,height)``.

    Each grid cell is split along its up-right diagonal into two
    counterclockwise triangles.  ``tagging`` assigns one region to each of
    the four sides ``bottom``, ``right``, ``top``, ``left``.
    """
    if width <= 0.0 or height <= 0.0:
        raise InvalidGeometryError("rectangle dimensions must be positive")
    if nx < 1 or ny < 1:
        raise InvalidGeometryError("subdivision counts must be at least 1")
    missing = [s for s in SIDES if s not in tagging]
    if missing:
        raise InvalidGeometryError(f"tagging misses sides: {missing}")

    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i: int, j: int) -> int:
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))

    edges = []
    tags: list[RegionTag] = []
    for i in range(nx):  # bottom, travelling +x keeps the domain on the left
        edges.append((vid(i, 0), vid(i + 1, 0)))
        tags.append(tagging["bottom"])
    for j in range(ny):  # right, travelling +y
        edges.append((vid(nx, j), vid(nx, j + 1)))
        tags.append(tagging["right"])
    for i in range(nx, 0, -1):  # top, travelling -x
        edges.append((vid(i, ny), vid(i - 1, ny)))
        tags.append(tagging["top"])
    for j in range(ny, 0, -1):  # left, travelling -y
        edges.append((vid(0, j), vid(0, j - 1)))
        tags.append(tagging["left"])

    h = float(np.hypot(width / nx, height / ny))
    return TriangulationLevel(
        vertices=vertices,
        triangles=np.asarray(tris, dtype=np.int64),
        segments=np.empty((0, 2), dtype=np.int64),
        boundary_edges=np.asarray(edges, dtype=np.int64),
        boundary_tags=tuple(tags),
        level=0,
        h=h,
        dim=2,
    )


def build_interval_mesh(n: int) -> TriangulationLevel:
    """Uniform mesh of (0,1): clamped left endpoint, contact right endpoint."""
    if n < 1:
        raise InvalidGeometryError("interval mesh needs at least one element")
    xs = np.linspace(0.0, 1.0, n + 1)
    vertices = np.column_stack([xs, np.zeros(n + 1)])
    segments = np.column_stack([np.arange(n), np.arange(1, n + 1)]).astype(np.int64)
    boundary = np.array([[0, 0], [n, n]], dtype=np.int64)
    return TriangulationLevel(
        vertices=vertices,
        triangles=np.empty((0, 3), dtype=np.int64),
        segments=segments,
        boundary_edges=boundary,
        boundary_tags=(RegionTag.DIRICHLET, RegionTag.CONTACT1),
        level=0,
        h=1.0 / n,
        dim=1,
    )


def _midpoint_index(mesh: TriangulationLevel):
    """Deterministic midpoint numbering used by refinement and prolongation."""
    pairs: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    elems = mesh.triangles if mesh.dim == 2 else mesh.segments
    loops = ((0, 1), (1, 2), (2, 0)) if mesh.dim == 2 else ((0, 1),)
    for elem in elems:
        for a, b in loops:
            key = (min(elem[a], elem[b]), max(elem[a], elem[b]))
            if key not in seen:
                seen[key] = mesh.n_vertices + len(pairs)
                pairs.append(key)
    return seen, np.asarray(pairs, dtype=np.int64)


def refine_uniform(mesh: TriangulationLevel) -> TriangulationLevel:
    """Red refinement: split every element through its edge midpoints."""
    mid, pairs = _midpoint_index(mesh)
    new_verts = np.vstack(
        [mesh.vertices, 0.5 * (mesh.vertices[pairs[:, 0]] + mesh.vertices[pairs[:, 1]])]
    ) if pairs.size else mesh.vertices.copy()

    def m(a: int, b: int) -> int:
        return mid[(min(a, b), max(a, b))]

    if mesh.dim == 2:
        tris = []
        for v0, v1, v2 in mesh.triangles:
            m01, m12, m20 = m(v0, v1), m(v1, v2), m(v2, v0)
            tris.extend([(v0, m01, m20), (v1, m12, m01), (v2, m20, m12), (m01, m12, m20)])
        edges = []
        tags: list[RegionTag] = []
        for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            mm = m(a, b)
            edges.extend([(a, mm), (mm, b)])
            tags.extend([tag, tag])
        return TriangulationLevel(
            vertices=new_verts,
            triangles=np.asarray(tris, dtype=np.int64),
            segments=np.empty((0, 2), dtype=np.int64),
            boundary_edges=np.asarray(edges, dtype=np.int64),
            boundary_tags=tuple(tags),
            level=mesh.level + 1,
            h=mesh.h / 2.0,
            dim=2,
        )
    segs = []
    for a, b in mesh.segments:
        mm = m(a, b)
        segs.extend([(a, mm), (mm, b)])
    return TriangulationLevel(
        vertices=new_verts,
        triangles=np.empty((0, 3), dtype=np.int64),
        segments=np.asarray(segs, dtype=np.int64),
        boundary_edges=mesh.boundary_edges.copy(),
        boundary_tags=mesh.boundary_tags,
        level=mesh.level + 1,
        h=mesh.h / 2.0,
        dim=1,
    )


def prolongation_matrix(coarse: TriangulationLevel, fine: TriangulationLevel):
    """Nodal injection from a mesh to its red refinement (exact on P1).

    Coarse vertices keep their indices under :func:`refine_uniform`; new
    vertices are edge midpoints, so the interpolated value is the endpoint
    average.  Returns a sparse ``(n_fine, n_coarse)`` matrix.
    """
    mid, pairs = _midpoint_index(coarse)
    n_new = pairs.shape[0]
    if coarse.n_vertices + n_new != fine.n_vertices:
        raise InvalidGeometryError("fine mesh is not the refinement of the coarse one")
    rows = list(range(coarse.n_vertices))
    cols = list(range(coarse.n_vertices))
    vals = [1.0] * coarse.n_vertices
    for k, (a, b) in enumerate(pairs):
        rows.extend([coarse.n_vertices + k] * 2)
        cols.extend([a, b])
        vals.extend([0.5, 0.5])
    return sparse.csr_matrix(
        (vals, (rows, cols)), shape=(fine.n_vertices, coarse.n_vertices)
    )


def total_area(mesh: TriangulationLevel) -> float:
    if mesh.dim == 1:
        lens = mesh.vertices[mesh.segments[:, 1], 0] - mesh.vertices[mesh.segments[:, 0], 0]
        return float(lens.sum())
    area, _ = tri_geometry(mesh.vertices, mesh.triangles)
    return float(area.sum())


def min_angle(mesh: TriangulationLevel) -> float:
    """Smallest interior angle over all triangles, in radians."""
    if mesh.dim != 2:
        raise InvalidGeometryError("angles are defined for 2D meshes only")
    p = mesh.vertices[mesh.triangles]
    angles = []
    for i in range(3):
        a = p[:, (i + 1) % 3] - p[:, i]
        b = p[:, (i + 2) % 3] - p[:, i]
        cosang = np.einsum("td,td->t", a, b) / (
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        )
        angles.append(np.arccos(np.clip(cosang, -1.0, 1.0)))
    return float(np.min(np.stack(angles)))


# ---------------------------------------------------------------------------
# plain-text mesh format


def save_mesh(mesh: TriangulationLevel, path) -> None:
    lines = [f"vhi-mesh v1 dim={mesh.dim}"]
    lines.append(str(mesh.n_vertices))
    for x, y in mesh.vertices:
        lines.append(f"{float(x)!r} {float(y)!r}")
    elems = mesh.triangles if mesh.dim == 2 else mesh.segments
    lines.append(str(elems.shape[0]))
    for row in elems:
        lines.append(" ".join(str(int(v)) for v in row))
    lines.append(str(mesh.boundary_edges.shape[0]))
    for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        lines.append(f"{int(a)} {int(b)} {tag.value}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mesh(path) -> TriangulationLevel:
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split("\n")
    header = tokens[0].split()
    if len(header) != 3 or header[0] != "vhi-mesh" or header[1] != "v1":
        raise InvalidGeometryError(f"bad mesh header: {tokens[0]!r}")
    dim = int(header[2].split("=")[1])
    pos = 1
    nv = int(tokens[pos]); pos += 1
    verts = np.array(
        [[float(w) for w in tokens[pos + k].split()] for k in range(nv)]
    )
    pos += nv
    ne = int(tokens[pos]); pos += 1
    elems = np.array(
        [[int(w) for w in tokens[pos + k].split()] for k in range(ne)], dtype=np.int64
    ) if ne else np.empty((0, 3 if dim == 2 else 2), dtype=np.int64)
    pos += ne
    nb = int(tokens[pos]); pos += 1
    edges = np.empty((nb, 2), dtype=np.int64)
    tags = []
    for k in range(nb):
        a, b, name = tokens[pos + k].split()
        edges[k] = (int(a), int(b))
        tags.append(_TAG_FROM_NAME[name])

    if dim == 2:
        lengths = np.hypot(
            *(verts[elems[:, [1, 2, 0]]] - verts[elems]).transpose(2, 0, 1)
        )
        h = float(lengths.max())
        triangles, segments = elems, np.empty((0, 2), dtype=np.int64)
    else:
        h = float((verts[elems[:, 1], 0] - verts[elems[:, 0], 0]).max())
        triangles, segments = np.empty((0, 3), dtype=np.int64), elems
    # refinement depth is not part of the interchange format
    return TriangulationLevel(
        vertices=verts,
        triangles=triangles,
        segments=segments,
        boundary_edges=edges,
        boundary_tags=tuple(tags),
        level=0,
        h=h,
        dim=dim,
    )
