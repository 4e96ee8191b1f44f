"""Convergence experiments: trace constants, sweeps, and audits.

The sweep machinery reproduces the qualitative convergence statement
empirically: solutions of the penalized discrete problem approach the
constrained solution as the mesh size and the penalty parameter shrink
together (diagonal coupling) or independently (grid coupling).  Errors are
measured in the discrete energy norm on a common reference level reached by
nested-mesh injection, so no interpolation error enters the tables.
"""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as dla
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import EigenNonconvergence, InvalidGeometryError, SmallnessViolation, SolverError, SweepIncomplete
from .fem import (
    LinearIsotropic,
    assemble_boundary_mass,
    build_dofmap,
    energy_matrix,
    stiffness_matrix,
)
from .mesh import RegionTag, TriangulationLevel, prolongation_matrix, refine_uniform
from .model import (
    ConstantsReport,
    JDescendingNormal,
    JSlipWeakening,
    JZero,
    PhiTresca,
    PhiZero,
    ProblemSpec,
    constraint_values_gp,
    penalty_quadrature,
    report_constants,
)
from .solver import (
    SolverConfig,
    solve_constrained_activeset,
    solve_penalized,
    solve_penalized_continuation,
)


# ---------------------------------------------------------------------------
# trace eigenvalues


def estimate_trace_eigenvalue(
    mesh: TriangulationLevel,
    mode: str,
    material: LinearIsotropic | None = None,
    region: RegionTag = RegionTag.CONTACT1,
    tol: float = 1e-10,
) -> float:
    """Smallest generalized eigenvalue of stiffness against boundary mass.

    ``mode`` selects the boundary pairing: ``full_vector``, ``normal_component``
    or ``scalar``.  The stiffness defaults to the energy normalization
    (symmetrized-gradient inner product); trace-free directions carry no
    boundary mass and are deflated automatically by solving for the largest
    eigenvalue of the flipped pencil.
    """
    if mode not in ("full_vector", "normal_component", "scalar"):
        raise InvalidGeometryError(f"unknown eigenvalue mode {mode!r}")
    material = material if material is not None else LinearIsotropic(0.0, 0.5)
    if not isinstance(material, LinearIsotropic):
        raise InvalidGeometryError("trace eigenvalues use the linear material")
    dim = 1 if mode == "scalar" else 2
    dofmap = build_dofmap(mesh, dim)
    free = dofmap.free_dofs
    K = stiffness_matrix(mesh, material, dofmap)[free][:, free].tocsc()
    M = assemble_boundary_mass(mesh, region, mode, dofmap)[free][:, free].tocsr()
    n = K.shape[0]
    if n <= 600:
        vals = dla.eigh(M.toarray(), K.toarray(), eigvals_only=True)
        mu = float(vals[-1])
    else:
        v0 = np.asarray(M @ np.ones(n)).ravel()
        if not np.any(v0):
            raise EigenNonconvergence("boundary mass has empty range")
        try:
            vals = eigsh(
                M, k=1, M=K, which="LA", v0=v0, tol=tol, maxiter=10000,
                return_eigenvectors=False,
            )
        except ArpackNoConvergence as exc:
            raise EigenNonconvergence(f"trace eigenvalue iteration stalled: {exc}")
        mu = float(vals[0])
    if mu <= 0.0 or not np.isfinite(mu):
        raise EigenNonconvergence(f"nonpositive trace eigenvalue estimate ({mu})")
    return 1.0 / mu


def problem_constants(spec: ProblemSpec, mesh: TriangulationLevel) -> ConstantsReport:
    """Trace constants and smallness verdict for one problem on one mesh.

    The full-trace eigenvalue is taken on the region the convex functional
    acts on (falling back to the potential's region, then the constrained
    region); the normal-trace eigenvalue on the potential's region.  The
    tangential trace of the slip-weakening term is bounded through the full
    trace, which makes its margin conservative.
    """
    if spec.dimension == 1:
        lam = estimate_trace_eigenvalue(mesh, "scalar", region=spec.penalty.region)
        return report_constants(spec, lam, lam)
    full_region = spec.penalty.region
    if not isinstance(spec.phi, (PhiZero, PhiTresca)):
        full_region = spec.phi.region
    elif isinstance(spec.j, JSlipWeakening):
        full_region = spec.j.region
    normal_region = (
        spec.j.region if isinstance(spec.j, JDescendingNormal) else spec.penalty.region
    )
    lam_full = estimate_trace_eigenvalue(mesh, "full_vector", region=full_region)
    lam_normal = estimate_trace_eigenvalue(mesh, "normal_component", region=normal_region)
    return report_constants(spec, lam_full, lam_normal)


# ---------------------------------------------------------------------------
# sweep plans and reports


@dataclass(frozen=True)
class SweepPlan:
    """Which (level, epsilon) cells to solve and what to compare against.

    ``coupling`` is ``diagonal`` (epsilon = C * h^p per level) or ``grid``
    (every level paired with every listed epsilon).  The reference is the
    known closed-form solution, a fine-level tiny-epsilon surrogate, or the
    direct constrained solve on the finest level.
    """

    refinement_levels: tuple[int, ...]
    epsilons: tuple[float, ...] = ()
    coupling: str = "diagonal"
    diagonal_c: float = 1.0
    diagonal_p: float = 1.0
    reference: str = "constrained_oracle"
    reference_level: int | None = None
    reference_epsilon: float = 1e-10

    def __post_init__(self):
        levels = self.refinement_levels
        if len(levels) == 0 or any(b <= a for a, b in zip(levels, levels[1:])):
            raise InvalidGeometryError("refinement levels must be strictly increasing")
        eps = self.epsilons
        if any(b >= a for a, b in zip(eps, eps[1:])) or any(e <= 0.0 for e in eps):
            raise InvalidGeometryError("epsilons must be positive and strictly decreasing")
        if self.coupling not in ("diagonal", "grid"):
            raise InvalidGeometryError("coupling must be 'diagonal' or 'grid'")
        if self.coupling == "diagonal" and self.diagonal_p <= 0.0:
            raise InvalidGeometryError("diagonal coupling needs a positive exponent")
        if self.coupling == "grid" and len(eps) == 0:
            raise InvalidGeometryError("grid coupling needs an epsilon list")
        if self.reference not in ("analytic", "fine_oracle", "constrained_oracle"):
            raise InvalidGeometryError(f"unknown reference kind {self.reference!r}")


@dataclass(frozen=True)
class SweepRow:
    level: int
    h: float
    eps: float
    energy_err: float
    trace_err: float
    violation: float
    norm: float
    iters: int


@dataclass
class ConvergenceReport:
    label: str
    reference: str
    rows: list[SweepRow] = field(default_factory=list)
    complete: bool = True
    rate_h: float = float("nan")
    rate_eps: float = float("nan")
    reference_norm: float = float("nan")

    def diagonal_rows(self, plan: SweepPlan) -> list[SweepRow]:
        if plan.coupling == "diagonal":
            return list(self.rows)
        pairs = list(zip(plan.refinement_levels, plan.epsilons))
        out = []
        for lvl, eps in pairs:
            for row in self.rows:
                if row.level == lvl and row.eps == eps:
                    out.append(row)
        return out


CSV_HEADER = "h,eps,energy_err,trace_err,violation,norm,iters"


def write_report_csv(report: ConvergenceReport, path) -> None:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            f"{r.h!r},{r.eps!r},{r.energy_err!r},{r.trace_err!r},"
            f"{r.violation!r},{r.norm!r},{r.iters}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_constants_report(report: ConstantsReport, path) -> None:
    keys = (
        "label", "lambda_1V", "lambda_1nuV", "c_phi", "c_j", "m_A",
        "alpha_phi", "alpha_j", "smallness_margin", "verdict",
    )
    with open(path, "w", encoding="utf-8") as fh:
        for k in keys:
            v = getattr(report, k)
            fh.write(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n")


# ---------------------------------------------------------------------------
# sweep execution


def mesh_family(base: TriangulationLevel, up_to: int) -> list[TriangulationLevel]:
    meshes = [base]
    for _ in range(up_to):
        meshes.append(refine_uniform(meshes[-1]))
    return meshes


def _prolongate(meshes, dim: int, u_full: np.ndarray, src: int, dst: int) -> np.ndarray:
    out = u_full
    for lvl in range(src, dst):
        P = prolongation_matrix(meshes[lvl], meshes[lvl + 1])
        if dim == 2:
            P = sparse.kron(P, sparse.identity(2, format="csr"), format="csr")
        out = P @ out
    return out


def plan_cells(plan: SweepPlan, meshes) -> list[tuple[int, float]]:
    if plan.coupling == "diagonal":
        return [
            (lvl, plan.diagonal_c * meshes[lvl].h ** plan.diagonal_p)
            for lvl in plan.refinement_levels
        ]
    return [
        (lvl, eps) for lvl in plan.refinement_levels for eps in plan.epsilons
    ]


def _reference_vector(spec, plan, meshes, config, constants, analytic=None):
    top = max(plan.refinement_levels)
    if plan.reference == "analytic":
        if analytic is None:
            from .problems import analytic_solution

            analytic = analytic_solution(spec.label)
        if analytic is None:
            raise InvalidGeometryError(f"no closed-form reference for {spec.label}")
        ref_level = top
        vals = np.asarray(analytic(meshes[ref_level].vertices), dtype=float)
        u_ref = vals.ravel() if spec.dimension == 2 else vals
        return ref_level, u_ref
    if plan.reference == "constrained_oracle":
        if not isinstance(spec.j, JZero):
            raise InvalidGeometryError("the constrained oracle needs a zero potential")
        ref_level = top
        oracle = solve_constrained_activeset(spec, meshes[ref_level], config)
        dm = build_dofmap(meshes[ref_level], spec.dimension)
        return ref_level, dm.expand(oracle.coefficients)
    ref_level = plan.reference_level if plan.reference_level is not None else top + 2
    if ref_level < top:
        raise InvalidGeometryError("surrogate reference level must not be coarser than the sweep")
    sol = solve_penalized_continuation(
        spec, meshes[ref_level], plan.reference_epsilon, config, constants=constants
    )
    dm = build_dofmap(meshes[ref_level], spec.dimension)
    return ref_level, dm.expand(sol.coefficients)


def run_sweep(
    spec: ProblemSpec,
    plan: SweepPlan,
    config: SolverConfig | None = None,
    workers: int = 1,
    force: bool = False,
    constants: ConstantsReport | None = None,
) -> ConvergenceReport:
    """Solve every cell of the plan and tabulate errors against the reference.

    A solver failure in any cell aborts the sweep and raises with the rows
    completed so far attached and marked incomplete.
    """
    config = config or SolverConfig()
    top = max(plan.refinement_levels)
    ref_level_needed = (
        plan.reference_level if plan.reference == "fine_oracle" and plan.reference_level is not None
        else (top + 2 if plan.reference == "fine_oracle" else top)
    )
    meshes = mesh_family(spec.mesh, max(top, ref_level_needed))

    if constants is None:
        constants = problem_constants(spec, meshes[top])
    if constants.verdict != "satisfied" and not force:
        raise SmallnessViolation(
            f"uniqueness condition violated (margin {constants.smallness_margin:.6g})"
        )

    ref_level, u_ref = _reference_vector(spec, plan, meshes, config, constants)
    ref_mesh = meshes[ref_level]
    ref_dm = build_dofmap(ref_mesh, spec.dimension)
    K_ref = energy_matrix(ref_mesh, ref_dm)
    contact_mode = "scalar" if spec.dimension == 1 else "full_vector"
    M_ref = assemble_boundary_mass(ref_mesh, spec.penalty.region, contact_mode, ref_dm)
    ref_norm = float(np.sqrt(max(u_ref @ (K_ref @ u_ref), 0.0)))

    cells = plan_cells(plan, meshes)

    def run_cell(cell):
        lvl, eps = cell
        mesh = meshes[lvl]
        sol = solve_penalized(
            spec, mesh, eps, config,
            constants=constants, allow_smallness_violation=force,
        )
        dm = build_dofmap(mesh, spec.dimension)
        u_full = dm.expand(sol.coefficients)
        quad = penalty_quadrature(mesh, spec.penalty)
        q = constraint_values_gp(spec.penalty, quad, dm, u_full)
        violation = float(np.sum(quad.gp_w * np.maximum(q, 0.0) ** 2))
        Ke = energy_matrix(mesh, dm)
        norm = float(np.sqrt(max(u_full @ (Ke @ u_full), 0.0)))
        diff = _prolongate(meshes, spec.dimension, u_full, lvl, ref_level) - u_ref
        energy_err = float(np.sqrt(max(diff @ (K_ref @ diff), 0.0)))
        trace_err = float(np.sqrt(max(diff @ (M_ref @ diff), 0.0)))
        return SweepRow(
            level=lvl, h=mesh.h, eps=float(eps),
            energy_err=energy_err, trace_err=trace_err,
            violation=violation, norm=norm,
            iters=sol.diagnostics.newton_iterations,
        )

    rows: list[SweepRow | None] = [None] * len(cells)
    failure: SolverError | None = None
    if workers <= 1:
        for k, cell in enumerate(cells):
            try:
                rows[k] = run_cell(cell)
            except SolverError as exc:
                failure = exc
                break
    else:
        with cf.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_cell, cell): k for k, cell in enumerate(cells)}
            for fut in cf.as_completed(futures):
                k = futures[fut]
                try:
                    rows[k] = fut.result()
                except SolverError as exc:
                    failure = exc

    done = [r for r in rows if r is not None]
    report = ConvergenceReport(
        label=spec.label, reference=plan.reference, rows=done,
        complete=failure is None and len(done) == len(cells),
        reference_norm=ref_norm,
    )
    if failure is not None or not report.complete:
        report.complete = False
        raise SweepIncomplete(
            f"sweep aborted after {len(done)}/{len(cells)} cells: {failure}",
            partial_report=report,
            cause=failure,
        )
    _fit_rates(report, plan)
    return report


def _fit_rates(report: ConvergenceReport, plan: SweepPlan) -> None:
    diag = report.diagonal_rows(plan)
    diag = [r for r in diag if r.energy_err > 0.0]
    pts = diag[-3:]
    if len(pts) >= 2:
        le = np.log([r.energy_err for r in pts])
        report.rate_h = float(np.polyfit(np.log([r.h for r in pts]), le, 1)[0])
        report.rate_eps = float(np.polyfit(np.log([r.eps for r in pts]), le, 1)[0])


# ---------------------------------------------------------------------------
# audits


@dataclass(frozen=True)
class BoundednessAudit:
    max_norm: float
    monotone_flag: bool


def boundedness_audit(report: ConvergenceReport, ratio_cap: float = 1.05) -> BoundednessAudit:
    """Uniform boundedness check over a completed sweep.

    At fixed mesh size the solution norm must not grow as the penalty
    parameter decreases: successive-epsilon norm ratios stay below the cap.
    """
    if not report.rows:
        raise InvalidGeometryError("cannot audit an empty report")
    max_norm = max(r.norm for r in report.rows)
    monotone = np.isfinite(max_norm)
    by_level: dict[int, list[SweepRow]] = {}
    for r in report.rows:
        by_level.setdefault(r.level, []).append(r)
    for rows in by_level.values():
        rows = sorted(rows, key=lambda r: -r.eps)
        for a, b in zip(rows, rows[1:]):
            if b.norm > ratio_cap * max(a.norm, 1e-300):
                monotone = False
    return BoundednessAudit(max_norm=float(max_norm), monotone_flag=bool(monotone))


@dataclass(frozen=True)
class ReductionCheck:
    passed: bool
    difference: float


def special_case_reduction_check(
    spec: ProblemSpec,
    epsilon: float = 1e-2,
    levels: int = 2,
    tol: float = 1e-12,
    config: SolverConfig | None = None,
) -> ReductionCheck:
    """General vs reduced solve path equivalence when a term vanishes.

    The general path routes zero ingredients through the full assembly
    machinery; the reduced path compiles them out.  Both must produce the
    same solution.
    """
    if not isinstance(spec.phi, PhiZero) and not isinstance(spec.j, JZero):
        raise InvalidGeometryError("reduction check needs a vanishing term")
    mesh = spec.mesh
    for _ in range(levels):
        mesh = refine_uniform(mesh)
    config = config or SolverConfig()
    reduced = solve_penalized(spec, mesh, epsilon, config)
    generic = solve_penalized(spec, mesh, epsilon, config, force_generic_terms=True)
    dm = build_dofmap(mesh, spec.dimension)
    Ke = energy_matrix(mesh, dm)
    d = dm.expand(reduced.coefficients - generic.coefficients)
    diff = float(np.sqrt(max(d @ (Ke @ d), 0.0)))
    scale = max(1.0, float(np.sqrt(max(
        dm.expand(reduced.coefficients) @ (Ke @ dm.expand(reduced.coefficients)), 0.0))))
    return ReductionCheck(passed=diff <= tol * scale, difference=diff)
