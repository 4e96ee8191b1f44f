"""Piecewise-linear finite element assembly on triangulation levels.

Handles scalar and 2-component displacement fields with the Dirichlet
condition imposed by degree-of-freedom elimination.  Quadrature is exact
for the polynomial degrees that occur: one centroid point per element for
stiffness terms (strains of P1 fields are elementwise constant) and a
2-point Gauss rule per boundary edge (exact for products of linear traces).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import sparse

from . import kernels
from .errors import AssemblyError, EmptyRegionError, InvalidGeometryError
from .mesh import RegionTag, TriangulationLevel

# Gauss points on the unit segment, exact through cubic integrands.
_GAUSS_XI = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
_GAUSS_W = np.array([0.5, 0.5])


# ---------------------------------------------------------------------------
# materials


@dataclass(frozen=True)
class LinearIsotropic:
    """Linear isotropic stress: ``2*mu*e + lambda*tr(e)*I``.

    In scalar mode only ``2*mu`` enters (the gradient flux coefficient), so
    ``LinearIsotropic(0, 1/2)`` reproduces the plain Laplacian.
    """

    lame_lambda: float
    lame_mu: float

    def __post_init__(self):
        if self.lame_mu <= 0.0 or self.lame_lambda < 0.0:
            raise InvalidGeometryError("need lame_mu > 0 and lame_lambda >= 0")

    @property
    def monotonicity_constant(self) -> float:
        return 2.0 * self.lame_mu

    @property
    def lipschitz_constant(self) -> float:
        return 2.0 * self.lame_mu + 2.0 * self.lame_lambda


@dataclass(frozen=True)
class NonlinearHencky:
    """Saturating nonlinear stress ``2*(mu0 + mu1/(1 + saturation*|e|))*e``.

    Strongly monotone with constant ``2*mu0`` and Lipschitz with constant
    ``2*(mu0 + mu1)``.  The parameter guard ``mu1*saturation <= mu0`` keeps
    the softening branch well inside the monotone regime.
    """

    mu0: float
    mu1: float
    saturation: float

    def __post_init__(self):
        if self.mu0 <= 0.0 or self.mu1 < 0.0 or self.saturation < 0.0:
            raise InvalidGeometryError("need mu0 > 0 and nonnegative mu1, saturation")
        if self.mu1 * self.saturation > self.mu0:
            raise InvalidGeometryError("softening too strong: require mu1*saturation <= mu0")

    @property
    def monotonicity_constant(self) -> float:
        return 2.0 * self.mu0

    @property
    def lipschitz_constant(self) -> float:
        return 2.0 * (self.mu0 + self.mu1)


MaterialLaw = LinearIsotropic | NonlinearHencky


def _as_field(value, dim: int) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap constants / component tuples as vectorized position functions."""
    if callable(value):
        return value
    if dim == 1:
        const = float(value)
        return lambda x: np.full(x.shape[0], const)
    flat = np.asarray(value, dtype=float).ravel()
    vec = np.full(2, flat[0]) if flat.size == 1 else flat.reshape(2)
    return lambda x: np.tile(vec, (x.shape[0], 1))


@dataclass(frozen=True)
class LoadSpec:
    """Volume force density and boundary traction on the traction region.

    Entries may be constants, component tuples, or callables mapping an
    ``(n, 2)`` array of positions to sampled values.  Samples are checked
    for finiteness at the quadrature points during assembly.
    """

    body_force: object = 0.0
    traction: object = 0.0


def _sample(field, points: np.ndarray, dim: int, what: str) -> np.ndarray:
    vals = np.asarray(_as_field(field, dim)(points), dtype=float)
    want = (points.shape[0],) if dim == 1 else (points.shape[0], 2)
    if vals.shape != want:
        raise AssemblyError(f"{what} returned shape {vals.shape}, expected {want}")
    if not np.all(np.isfinite(vals)):
        raise AssemblyError(f"{what} produced non-finite values at quadrature points")
    return vals


# ---------------------------------------------------------------------------
# degrees of freedom


@dataclass(frozen=True)
class DofMap:
    """Node/component to global index map with clamped dofs removed.

    Global index of component ``c`` at vertex ``v`` is ``v*dimension + c``.
    Every component of every vertex on the clamped region is excluded from
    ``free_dofs``.
    """

    dimension: int
    n_nodes: int
    free_dofs: np.ndarray
    is_free: np.ndarray

    def __post_init__(self):
        self.free_dofs.setflags(write=False)
        self.is_free.setflags(write=False)

    @property
    def n_dofs(self) -> int:
        return self.n_nodes * self.dimension

    def node_dof(self, node: int, comp: int = 0) -> int:
        return node * self.dimension + comp

    def restrict(self, full: np.ndarray) -> np.ndarray:
        return full[self.free_dofs]

    def expand(self, free: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n_dofs)
        out[self.free_dofs] = free
        return out


def build_dofmap(mesh: TriangulationLevel, dimension: int) -> DofMap:
    if dimension not in (1, 2):
        raise InvalidGeometryError("dimension must be 1 (scalar) or 2 (displacement)")
    if mesh.dim == 1 and dimension != 1:
        raise InvalidGeometryError("interval meshes carry scalar fields only")
    clamped_nodes = mesh.region_nodes(RegionTag.DIRICHLET)
    n_dofs = mesh.n_vertices * dimension
    is_free = np.ones(n_dofs, dtype=bool)
    for node in clamped_nodes:
        for c in range(dimension):
            is_free[node * dimension + c] = False
    return DofMap(
        dimension=dimension,
        n_nodes=mesh.n_vertices,
        free_dofs=np.flatnonzero(is_free),
        is_free=is_free,
    )


# ---------------------------------------------------------------------------
# stiffness


def _geometry(mesh: TriangulationLevel):
    if mesh.dim == 2:
        area, grads = kernels.tri_geometry(mesh.vertices, mesh.triangles)
        if np.any(area <= 0.0):
            raise AssemblyError("degenerate triangle during assembly")
        return area, grads
    x0 = mesh.vertices[mesh.segments[:, 0], 0]
    x1 = mesh.vertices[mesh.segments[:, 1], 0]
    lens = x1 - x0
    if np.any(lens <= 0.0):
        raise AssemblyError("degenerate segment during assembly")
    grads = np.stack([-1.0 / lens, 1.0 / lens], axis=1)
    return lens, grads


def _scatter_local(elems: np.ndarray, local: np.ndarray, dofmap: DofMap):
    """COO triplets from per-element local matrices, (node, comp) ordering."""
    T, nloc = elems.shape
    dim = dofmap.dimension
    dofs = (elems[:, :, None] * dim + np.arange(dim)[None, None, :]).reshape(T, nloc * dim)
    rows = np.repeat(dofs, nloc * dim, axis=1).ravel()
    cols = np.tile(dofs, (1, nloc * dim)).ravel()
    return sparse.csr_matrix(
        (local.ravel(), (rows, cols)), shape=(dofmap.n_dofs, dofmap.n_dofs)
    )


def energy_matrix(mesh: TriangulationLevel, dofmap: DofMap) -> sparse.csr_matrix:
    """Matrix of the energy inner product (symmetrized-gradient pairing).

    This is the norm all convergence errors and dual residual norms use;
    it coincides with the ``LinearIsotropic(0, 1/2)`` stiffness.
    """
    return stiffness_matrix(mesh, LinearIsotropic(0.0, 0.5), dofmap)


def stiffness_matrix(
    mesh: TriangulationLevel, law: LinearIsotropic, dofmap: DofMap
) -> sparse.csr_matrix:
    if not isinstance(law, LinearIsotropic):
        raise AssemblyError("explicit stiffness matrices exist for the linear law only")
    geom, grads = _geometry(mesh)
    if mesh.dim == 1:
        local = np.einsum("t,ti,tj->tij", 2.0 * law.lame_mu * geom, grads, grads)
        return _scatter_local(mesh.segments, local, dofmap)
    if dofmap.dimension == 1:
        local = kernels.scalar_stiffness_local(geom, grads, 2.0 * law.lame_mu)
        return _scatter_local(mesh.triangles, local, dofmap)
    local = kernels.elastic_stiffness_local(geom, grads, law.lame_lambda, law.lame_mu)
    return _scatter_local(mesh.triangles, local, dofmap)


def _hencky_local(mesh, law: NonlinearHencky, dofmap: DofMap, u_full: np.ndarray):
    geom, grads = _geometry(mesh)
    if mesh.dim == 1:
        u_loc = u_full[mesh.segments]
        g = np.einsum("ti,ti->t", u_loc, grads)
        s = np.abs(g)
        c = 2.0 * (law.mu0 + law.mu1 / (1.0 + law.saturation * s))
        cp = -2.0 * law.mu1 * law.saturation / (1.0 + law.saturation * s) ** 2
        res = geom[:, None] * (c * g)[:, None] * grads
        slope = c + np.where(s > 0, cp * s, 0.0)
        tan = np.einsum("t,ti,tj->tij", geom * slope, grads, grads)
        return mesh.segments, res, tan
    if dofmap.dimension == 1:
        u_loc = u_full[mesh.triangles]
        res, tan = kernels.scalar_saturating_flux(
            geom, grads, u_loc, law.mu0, law.mu1, law.saturation
        )
        return mesh.triangles, res, tan
    u_loc = u_full.reshape(-1, 2)[mesh.triangles]
    res, tan = kernels.elastic_saturating_stress(
        geom, grads, u_loc, law.mu0, law.mu1, law.saturation
    )
    return mesh.triangles, res, tan


def stiffness_action(
    mesh: TriangulationLevel, law: MaterialLaw, dofmap: DofMap, u_full: np.ndarray
) -> np.ndarray:
    """Residual of the stress pairing tested against every basis function."""
    if isinstance(law, LinearIsotropic):
        return stiffness_matrix(mesh, law, dofmap) @ u_full
    elems, res, _ = _hencky_local(mesh, law, dofmap, u_full)
    out = np.zeros(dofmap.n_dofs)
    if dofmap.dimension == 1:
        np.add.at(out, elems, res)
    else:
        dofs = elems[:, :, None] * 2 + np.arange(2)[None, None, :]
        np.add.at(out, dofs.ravel(), res.ravel())
    return out


def stiffness_tangent(
    mesh: TriangulationLevel, law: MaterialLaw, dofmap: DofMap, u_full: np.ndarray
) -> sparse.csr_matrix:
    if isinstance(law, LinearIsotropic):
        return stiffness_matrix(mesh, law, dofmap)
    elems, _, tan = _hencky_local(mesh, law, dofmap, u_full)
    return _scatter_local(elems, tan, dofmap)


@dataclass(frozen=True)
class StiffnessOperator:
    """Stress-pairing operator: callable action, tangent, and (if linear) matrix."""

    action: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], sparse.csr_matrix]
    matrix: sparse.csr_matrix | None


def assemble_stiffness_action(
    mesh: TriangulationLevel, law: MaterialLaw, dofmap: DofMap
) -> StiffnessOperator:
    matrix = stiffness_matrix(mesh, law, dofmap) if isinstance(law, LinearIsotropic) else None
    return StiffnessOperator(
        action=lambda u: stiffness_action(mesh, law, dofmap, u),
        tangent=lambda u: stiffness_tangent(mesh, law, dofmap, u),
        matrix=matrix,
    )


# ---------------------------------------------------------------------------
# loads


def assemble_load(
    mesh: TriangulationLevel, loads: LoadSpec, dofmap: DofMap
) -> np.ndarray:
    """Load vector: centroid rule on elements, 2-point Gauss on traction edges."""
    out = np.zeros(dofmap.n_dofs)
    dim = dofmap.dimension
    if mesh.dim == 1:
        x0 = mesh.vertices[mesh.segments[:, 0]]
        x1 = mesh.vertices[mesh.segments[:, 1]]
        lens = (x1 - x0)[:, 0]
        mid = 0.5 * (x0 + x1)
        f = _sample(loads.body_force, mid, dim, "body_force")
        contrib = 0.5 * lens * f
        np.add.at(out, mesh.segments[:, 0], contrib)
        np.add.at(out, mesh.segments[:, 1], contrib)
        return out

    area, _ = _geometry(mesh)
    centroids = mesh.vertices[mesh.triangles].mean(axis=1)
    f = _sample(loads.body_force, centroids, dim, "body_force")
    if dim == 1:
        contrib = area * f / 3.0
        for i in range(3):
            np.add.at(out, mesh.triangles[:, i], contrib)
    else:
        contrib = (area[:, None] / 3.0) * f
        for i in range(3):
            dofs = mesh.triangles[:, i, None] * 2 + np.arange(2)[None, :]
            np.add.at(out, dofs.ravel(), contrib.ravel())

    neumann = mesh.edges_of_region(RegionTag.NEUMANN)
    if neumann.size:
        a = mesh.vertices[neumann[:, 0]]
        b = mesh.vertices[neumann[:, 1]]
        lens = np.hypot(*(b - a).T)
        for xi, w in zip(_GAUSS_XI, _GAUSS_W):
            pts = a + xi * (b - a)
            t = _sample(loads.traction, pts, dim, "traction")
            shape = np.array([1.0 - xi, xi])
            for i in range(2):
                if dim == 1:
                    np.add.at(out, neumann[:, i], w * lens * shape[i] * t)
                else:
                    dofs = neumann[:, i, None] * 2 + np.arange(2)[None, :]
                    vals = (w * lens * shape[i])[:, None] * t
                    np.add.at(out, dofs.ravel(), vals.ravel())
    return out


# ---------------------------------------------------------------------------
# boundary traces and contact quadrature


@dataclass(frozen=True)
class BoundaryTraceData:
    """Geometry of the contact boundary.

    Per contact edge: endpoints, length, outward unit normal, unit tangent
    (the normal rotated by +90 degrees, which is the direction of travel for
    edges oriented with the domain on the left).  Node normals are averaged
    over the contact edges meeting at the vertex.
    """

    edges: np.ndarray
    regions: tuple[RegionTag, ...]
    lengths: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    nodes: np.ndarray
    node_normals: np.ndarray


def boundary_trace_data(
    mesh: TriangulationLevel,
    regions: tuple[RegionTag, ...] = (RegionTag.CONTACT1, RegionTag.CONTACT2),
) -> BoundaryTraceData:
    rows = [
        (i, tag)
        for i, tag in enumerate(mesh.boundary_tags)
        if tag in regions
    ]
    if not rows:
        raise EmptyRegionError(f"no boundary edges tagged {[r.value for r in regions]}")
    idx = [i for i, _ in rows]
    edges = mesh.boundary_edges[idx]
    tags = tuple(tag for _, tag in rows)
    if mesh.dim == 1:
        normals = np.tile([1.0, 0.0], (edges.shape[0], 1))
        tangents = np.tile([0.0, 1.0], (edges.shape[0], 1))
        lengths = np.ones(edges.shape[0])
    else:
        d = mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]]
        lengths = np.hypot(d[:, 0], d[:, 1])
        tangents = d / lengths[:, None]
        normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    nodes = np.unique(edges.ravel())
    node_normals = np.zeros((nodes.shape[0], 2))
    pos = {int(n): k for k, n in enumerate(nodes)}
    for (a, b), nu in zip(edges, normals):
        node_normals[pos[int(a)]] += nu
        node_normals[pos[int(b)]] += nu
    norms = np.linalg.norm(node_normals, axis=1)
    node_normals /= norms[:, None]
    return BoundaryTraceData(
        edges=edges,
        regions=tags,
        lengths=lengths,
        normals=normals,
        tangents=tangents,
        nodes=nodes,
        node_normals=node_normals,
    )


def trace_values(
    u_full: np.ndarray, traces: BoundaryTraceData, dofmap: DofMap
) -> tuple[np.ndarray, np.ndarray]:
    """Normal and tangential parts of ``u`` at the contact vertices."""
    if dofmap.dimension == 1:
        u_nu = u_full[traces.nodes]
        return u_nu, np.zeros((traces.nodes.shape[0], 2))
    disp = u_full.reshape(-1, 2)[traces.nodes]
    u_nu = np.einsum("nd,nd->n", disp, traces.node_normals)
    u_tau = disp - u_nu[:, None] * traces.node_normals
    return u_nu, u_tau


@dataclass(frozen=True)
class ContactQuadrature:
    """Gauss data on the edges of one contact region.

    ``point_mode`` marks 1D endpoint constraints, where the single
    "quadrature point" is the tagged vertex itself with unit weight.
    """

    region: RegionTag
    edges: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    gp_x: np.ndarray
    gp_w: np.ndarray
    gp_edge: np.ndarray
    gp_shape: np.ndarray
    point_mode: bool

    @property
    def n_points(self) -> int:
        return self.gp_w.shape[0]


def contact_quadrature(mesh: TriangulationLevel, region: RegionTag) -> ContactQuadrature:
    edges = mesh.edges_of_region(region)
    if edges.shape[0] == 0:
        raise EmptyRegionError(f"no boundary edges tagged {region.value}")
    if mesh.dim == 1:
        return ContactQuadrature(
            region=region,
            edges=edges,
            normals=np.tile([1.0, 0.0], (edges.shape[0], 1)),
            tangents=np.tile([0.0, 1.0], (edges.shape[0], 1)),
            gp_x=mesh.vertices[edges[:, 0]],
            gp_w=np.ones(edges.shape[0]),
            gp_edge=np.arange(edges.shape[0]),
            gp_shape=np.tile([1.0, 0.0], (edges.shape[0], 1)),
            point_mode=True,
        )
    a = mesh.vertices[edges[:, 0]]
    b = mesh.vertices[edges[:, 1]]
    d = b - a
    lengths = np.hypot(d[:, 0], d[:, 1])
    tangents = d / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    gp_x, gp_w, gp_edge, gp_shape = [], [], [], []
    for xi, w in zip(_GAUSS_XI, _GAUSS_W):
        gp_x.append(a + xi * d)
        gp_w.append(w * lengths)
        gp_edge.append(np.arange(edges.shape[0]))
        gp_shape.append(np.tile([1.0 - xi, xi], (edges.shape[0], 1)))
    order = np.argsort(np.concatenate(gp_edge), kind="stable")
    return ContactQuadrature(
        region=region,
        edges=edges,
        normals=normals,
        tangents=tangents,
        gp_x=np.concatenate(gp_x)[order],
        gp_w=np.concatenate(gp_w)[order],
        gp_edge=np.concatenate(gp_edge)[order],
        gp_shape=np.concatenate(gp_shape)[order],
        point_mode=False,
    )


def normal_trace_gp(quad: ContactQuadrature, dofmap: DofMap, u_full: np.ndarray) -> np.ndarray:
    """Constraint quantity at quadrature points: u.n for vectors, u itself for scalars."""
    e = quad.edges[quad.gp_edge]
    if dofmap.dimension == 1:
        vals = u_full[e[:, 0]] * quad.gp_shape[:, 0] + u_full[e[:, 1]] * quad.gp_shape[:, 1]
        return vals
    disp = u_full.reshape(-1, 2)
    at_gp = (
        disp[e[:, 0]] * quad.gp_shape[:, 0, None]
        + disp[e[:, 1]] * quad.gp_shape[:, 1, None]
    )
    return np.einsum("qd,qd->q", at_gp, quad.normals[quad.gp_edge])


def tangential_trace_gp(quad: ContactQuadrature, dofmap: DofMap, u_full: np.ndarray) -> np.ndarray:
    """Signed tangential trace at quadrature points (2D displacement fields)."""
    if dofmap.dimension == 1:
        return np.zeros(quad.n_points)
    e = quad.edges[quad.gp_edge]
    disp = u_full.reshape(-1, 2)
    at_gp = (
        disp[e[:, 0]] * quad.gp_shape[:, 0, None]
        + disp[e[:, 1]] * quad.gp_shape[:, 1, None]
    )
    return np.einsum("qd,qd->q", at_gp, quad.tangents[quad.gp_edge])


def _direction(quad: ContactQuadrature, component: str) -> np.ndarray:
    return quad.normals if component == "normal" else quad.tangents


def scatter_gp(
    quad: ContactQuadrature,
    dofmap: DofMap,
    values: np.ndarray,
    component: str = "normal",
) -> np.ndarray:
    """Weighted scatter of pointwise values against the trace of every basis function.

    Returns the vector with entries ``sum_q w_q values_q d_c N_i(q)`` where
    ``d`` is the edge normal or tangent (ignored in scalar mode).
    """
    out = np.zeros(dofmap.n_dofs)
    e = quad.edges[quad.gp_edge]
    wv = quad.gp_w * values
    if dofmap.dimension == 1:
        np.add.at(out, e[:, 0], wv * quad.gp_shape[:, 0])
        np.add.at(out, e[:, 1], wv * quad.gp_shape[:, 1])
        return out
    dirs = _direction(quad, component)[quad.gp_edge]
    for i in range(2):
        vals = (wv * quad.gp_shape[:, i])[:, None] * dirs
        dofs = e[:, i, None] * 2 + np.arange(2)[None, :]
        np.add.at(out, dofs.ravel(), vals.ravel())
    return out


def gp_mass(
    quad: ContactQuadrature,
    dofmap: DofMap,
    diag: np.ndarray | None = None,
    component: str = "normal",
    full_vector: bool = False,
) -> sparse.csr_matrix:
    """Quadrature mass matrix with optional pointwise weights.

    Entries ``sum_q w_q diag_q (d_a N_i)(d_b N_j)``; with ``full_vector``
    both components couple through the identity instead of a direction.
    """
    d = np.ones(quad.n_points) if diag is None else diag
    e = quad.edges[quad.gp_edge]
    rows, cols, vals = [], [], []
    wv = quad.gp_w * d
    if dofmap.dimension == 1:
        for i in range(2):
            for j in range(2):
                rows.append(e[:, i])
                cols.append(e[:, j])
                vals.append(wv * quad.gp_shape[:, i] * quad.gp_shape[:, j])
    elif full_vector:
        for i in range(2):
            for j in range(2):
                base = wv * quad.gp_shape[:, i] * quad.gp_shape[:, j]
                for c in range(2):
                    rows.append(e[:, i] * 2 + c)
                    cols.append(e[:, j] * 2 + c)
                    vals.append(base)
    else:
        dirs = _direction(quad, component)[quad.gp_edge]
        for i in range(2):
            for j in range(2):
                base = wv * quad.gp_shape[:, i] * quad.gp_shape[:, j]
                for a in range(2):
                    for b in range(2):
                        rows.append(e[:, i] * 2 + a)
                        cols.append(e[:, j] * 2 + b)
                        vals.append(base * dirs[:, a] * dirs[:, b])
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.n_dofs, dofmap.n_dofs),
    )


def assemble_boundary_mass(
    mesh: TriangulationLevel,
    region: RegionTag,
    mode: str,
    dofmap: DofMap,
) -> sparse.csr_matrix:
    """Boundary mass matrix of one region.

    ``mode`` is one of ``scalar``, ``normal_component``, ``tangential_component``
    or ``full_vector``; the quadrature is exact for the products of linear
    traces involved.
    """
    quad = contact_quadrature_for_region(mesh, region)
    if mode == "scalar":
        if dofmap.dimension != 1:
            raise AssemblyError("scalar boundary mass needs a scalar dof map")
        return gp_mass(quad, dofmap)
    if dofmap.dimension != 2:
        raise AssemblyError(f"mode {mode!r} needs a displacement dof map")
    if mode == "full_vector":
        return gp_mass(quad, dofmap, full_vector=True)
    if mode == "normal_component":
        return gp_mass(quad, dofmap, component="normal")
    if mode == "tangential_component":
        return gp_mass(quad, dofmap, component="tangential")
    raise AssemblyError(f"unknown boundary mass mode {mode!r}")


def contact_quadrature_for_region(mesh, region: RegionTag) -> ContactQuadrature:
    # Thin wrapper so boundary masses can be built for any tagged region,
    # not just contact zones.
    edges = mesh.edges_of_region(region)
    if edges.shape[0] == 0:
        raise EmptyRegionError(f"no boundary edges tagged {region.value}")
    return contact_quadrature(mesh, region)


def export_sparse_matrix(matrix: sparse.spmatrix, path) -> None:
    """Coordinate text dump (``row col value`` per line, 0-based)."""
    coo = matrix.tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{int(r)} {int(c)} {float(v)!r}\n")
