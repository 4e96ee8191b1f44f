"""Solvers for the penalized discrete problem and constrained oracles.

The penalized solve freezes the slowly-varying ingredients (the first
argument of the convex functional and the branch base point of the
potential's derivative) in an outer fixed-point loop; each inner problem is
then smooth except for the positive-part penalty, which a semismooth Newton
iteration handles through a generalized Jacobian.  The uniqueness condition
on the problem constants is exactly a contraction condition for the outer
loop, and it is checked before solving unless explicitly overridden.

Two independent oracles solve the constrained problem directly when the
nonconvex potential vanishes: a primal-dual active set iteration, and an
exhaustive enumeration of active subsets for tiny instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import (
    CycleDetected,
    FixedPointNonconvergence,
    InvalidGeometryError,
    LinearSolveFailure,
    NewtonNonconvergence,
    NoFeasibleSubset,
    SmallnessViolation,
    SolverError,
    TooManyConstraints,
)
from .fem import (
    DofMap,
    LinearIsotropic,
    assemble_load,
    build_dofmap,
    energy_matrix,
    gp_mass,
    normal_trace_gp,
    scatter_gp,
    stiffness_action,
    stiffness_matrix,
    stiffness_tangent,
    tangential_trace_gp,
)
from .mesh import TriangulationLevel
from .model import (
    JDescendingNormal,
    JSlipWeakening,
    JZero,
    PhiCoulomb,
    PhiTresca,
    PhiZero,
    ProblemSpec,
    constraint_bound_gp,
    constraint_values_gp,
    contact_quadrature,
    huber,
    huber_prime,
    huber_second,
    penalty_jacobian,
    penalty_quadrature,
    penalty_residual,
)


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-10
    newton_max_iter: int = 60
    fixedpoint_tol: float = 1e-11
    fixedpoint_max_iter: int = 200
    line_search: str = "none"
    contraction_factor: float = 0.5
    min_step: float = 1e-12

    def __post_init__(self):
        if self.newton_tol <= 0.0 or self.fixedpoint_tol <= 0.0:
            raise InvalidGeometryError("tolerances must be positive")
        if self.newton_max_iter < 1 or self.fixedpoint_max_iter < 1:
            raise InvalidGeometryError("iteration budgets must be at least 1")
        if self.line_search not in ("none", "backtracking"):
            raise InvalidGeometryError("line_search must be 'none' or 'backtracking'")
        if not (0.0 < self.contraction_factor < 1.0):
            raise InvalidGeometryError("contraction_factor must lie in (0, 1)")


@dataclass
class Diagnostics:
    outer_iterations: int = 0
    newton_iterations: int = 0
    final_residual: float = np.inf
    active_count: int = 0
    converged: bool = False


@dataclass(frozen=True)
class DiscreteSolution:
    """Converged penalized solution on one mesh level."""

    coefficients: np.ndarray
    h: float
    epsilon: float
    diagnostics: Diagnostics


@dataclass(frozen=True)
class OracleSolution:
    """Direct constrained solution with active set and reaction multipliers."""

    coefficients: np.ndarray
    active_set: np.ndarray
    multipliers: np.ndarray


# ---------------------------------------------------------------------------
# shared workspace


class _Workspace:
    def __init__(self, spec: ProblemSpec, mesh: TriangulationLevel):
        self.spec = spec
        self.mesh = mesh
        self.dofmap = build_dofmap(mesh, spec.dimension)
        self.free = self.dofmap.free_dofs
        self.energy = energy_matrix(mesh, self.dofmap)
        self.energy_free = self.energy[self.free][:, self.free].tocsc()
        try:
            self.energy_lu = splu(self.energy_free)
        except RuntimeError as exc:  # pragma: no cover - guarded by mesh invariants
            raise LinearSolveFailure(f"energy matrix factorization failed: {exc}")
        self.f_full = assemble_load(mesh, spec.loads, self.dofmap)
        self.pen_quad = penalty_quadrature(mesh, spec.penalty)
        self._quads = {spec.penalty.region: self.pen_quad}
        self.linear_matrix = (
            stiffness_matrix(mesh, spec.material, self.dofmap)
            if isinstance(spec.material, LinearIsotropic)
            else None
        )
        self.delta = spec.effective_delta(mesh.h)
        self.load_scale = max(self.dual_norm(self.f_full[self.free]), 1e-300)

    def quad(self, region):
        if region not in self._quads:
            self._quads[region] = contact_quadrature(self.mesh, region)
        return self._quads[region]

    def dual_norm(self, r_free: np.ndarray) -> float:
        z = self.energy_lu.solve(r_free)
        return float(np.sqrt(max(float(r_free @ z), 0.0)))

    def energy_norm(self, u_full: np.ndarray) -> float:
        return float(np.sqrt(max(float(u_full @ (self.energy @ u_full)), 0.0)))

    def stiffness(self, u_full: np.ndarray) -> np.ndarray:
        if self.linear_matrix is not None:
            return self.linear_matrix @ u_full
        return stiffness_action(self.mesh, self.spec.material, self.dofmap, u_full)

    def tangent(self, u_full: np.ndarray) -> sparse.csr_matrix:
        if self.linear_matrix is not None:
            return self.linear_matrix
        return stiffness_tangent(self.mesh, self.spec.material, self.dofmap, u_full)


def _effective_terms(spec: ProblemSpec, force_generic: bool):
    """Active phi/j terms; with ``force_generic`` zero terms run through the
    generic machinery (contributing exact zeros) instead of being skipped."""
    phi, j = spec.phi, spec.j
    if force_generic:
        if isinstance(phi, PhiZero):
            phi = PhiTresca(bound=0.0, region=spec.penalty.region)
        if isinstance(j, JZero):
            j = JSlipWeakening(mu_s=0.0, mu_d=0.0, L_s=1.0, region=spec.penalty.region)
    return phi, j


@dataclass
class _Frozen:
    coulomb_bound: np.ndarray | None = None
    slip_coef: np.ndarray | None = None
    desc_slope: np.ndarray | None = None
    desc_intercept: np.ndarray | None = None


def _freeze(ws: _Workspace, phi, j, w_full: np.ndarray) -> _Frozen:
    fr = _Frozen()
    if isinstance(phi, PhiCoulomb):
        quad = ws.quad(phi.region)
        w_nu = normal_trace_gp(quad, ws.dofmap, w_full)
        fr.coulomb_bound = phi.bound_of(w_nu)
    if isinstance(j, JSlipWeakening):
        quad = ws.quad(j.region)
        w_t = tangential_trace_gp(quad, ws.dofmap, w_full)
        fr.slip_coef = j.rho_prime(huber(w_t, ws.delta))
    elif isinstance(j, JDescendingNormal):
        quad = ws.quad(j.region)
        w_nu = normal_trace_gp(quad, ws.dofmap, w_full)
        fr.desc_slope, fr.desc_intercept = j.branch_slope_intercept(w_nu)
    return fr


def _residual_terms(ws: _Workspace, phi, j, fr: _Frozen, u_full, epsilon):
    """Full-dof residual pieces of the smoothed stationarity system."""
    dm = ws.dofmap
    terms = {
        "stress": ws.stiffness(u_full),
        "penalty": penalty_residual(ws.spec.penalty, ws.pen_quad, dm, u_full) / epsilon,
        "load": -ws.f_full,
    }
    if isinstance(phi, PhiTresca):
        quad = ws.quad(phi.region)
        tr = (
            normal_trace_gp(quad, dm, u_full)
            if phi.component == "normal"
            else tangential_trace_gp(quad, dm, u_full)
        )
        vals = phi.bound_at(quad.gp_x) * huber_prime(tr, ws.delta)
        terms["phi"] = scatter_gp(quad, dm, vals, component=phi.component)
    elif isinstance(phi, PhiCoulomb):
        quad = ws.quad(phi.region)
        u_t = tangential_trace_gp(quad, dm, u_full)
        terms["phi"] = scatter_gp(
            quad, dm, fr.coulomb_bound * huber_prime(u_t, ws.delta), component="tangential"
        )
    else:
        terms["phi"] = np.zeros(dm.n_dofs)
    if isinstance(j, JSlipWeakening):
        quad = ws.quad(j.region)
        u_t = tangential_trace_gp(quad, dm, u_full)
        terms["potential"] = scatter_gp(
            quad, dm, fr.slip_coef * huber_prime(u_t, ws.delta), component="tangential"
        )
    elif isinstance(j, JDescendingNormal):
        quad = ws.quad(j.region)
        u_nu = normal_trace_gp(quad, dm, u_full)
        terms["potential"] = scatter_gp(
            quad, dm, fr.desc_slope * u_nu + fr.desc_intercept, component="normal"
        )
    else:
        terms["potential"] = np.zeros(dm.n_dofs)
    return terms


def _residual(ws, phi, j, fr, u_full, epsilon) -> np.ndarray:
    terms = _residual_terms(ws, phi, j, fr, u_full, epsilon)
    return sum(terms.values())


def _jacobian(ws: _Workspace, phi, j, fr: _Frozen, u_full, epsilon):
    dm = ws.dofmap
    J = ws.tangent(u_full) + penalty_jacobian(
        ws.spec.penalty, ws.pen_quad, dm, u_full
    ) / epsilon
    if isinstance(phi, PhiTresca):
        quad = ws.quad(phi.region)
        tr = (
            normal_trace_gp(quad, dm, u_full)
            if phi.component == "normal"
            else tangential_trace_gp(quad, dm, u_full)
        )
        diag = phi.bound_at(quad.gp_x) * huber_second(tr, ws.delta)
        J = J + gp_mass(quad, dm, diag=diag, component=phi.component)
    elif isinstance(phi, PhiCoulomb):
        quad = ws.quad(phi.region)
        u_t = tangential_trace_gp(quad, dm, u_full)
        J = J + gp_mass(
            quad, dm, diag=fr.coulomb_bound * huber_second(u_t, ws.delta),
            component="tangential",
        )
    if isinstance(j, JSlipWeakening):
        quad = ws.quad(j.region)
        u_t = tangential_trace_gp(quad, dm, u_full)
        J = J + gp_mass(
            quad, dm, diag=fr.slip_coef * huber_second(u_t, ws.delta),
            component="tangential",
        )
    elif isinstance(j, JDescendingNormal):
        quad = ws.quad(j.region)
        J = J + gp_mass(quad, dm, diag=fr.desc_slope, component="normal")
    return J


def _penalty_certificate_floor(ws: _Workspace, u_full: np.ndarray, epsilon: float) -> float:
    """Smallest residual a double-precision iterate can certify.

    The scaled penalty term amplifies the last representable bits of the
    active trace values by 1/epsilon; below this level the evaluated
    residual is representation noise, not solver error.
    """
    quad = ws.pen_quad
    q = constraint_values_gp(ws.spec.penalty, quad, ws.dofmap, u_full)
    active = q > 0.0
    if not np.any(active):
        return 0.0
    mag = (np.abs(normal_trace_gp(quad, ws.dofmap, u_full)) + constraint_bound_gp(ws.spec.penalty, quad)) * active
    vec = scatter_gp(quad, ws.dofmap, mag, component="normal")
    return 16.0 * np.finfo(float).eps / epsilon * ws.dual_norm(vec[ws.free])


def _newton(ws, phi, j, fr, u_full, epsilon, config, diag) -> np.ndarray:
    free = ws.free
    u = u_full.copy()
    r = _residual(ws, phi, j, fr, u, epsilon)
    rnorm = ws.dual_norm(r[free])
    tol = config.newton_tol * max(1.0, ws.load_scale)
    for _ in range(config.newton_max_iter):
        if rnorm <= tol + _penalty_certificate_floor(ws, u, epsilon):
            return u
        J = _jacobian(ws, phi, j, fr, u, epsilon)
        try:
            lu = splu(J[free][:, free].tocsc())
            du = lu.solve(-r[free])
        except RuntimeError as exc:
            raise LinearSolveFailure(f"Newton matrix factorization failed: {exc}", diag)
        if not np.all(np.isfinite(du)):
            raise LinearSolveFailure("Newton step is not finite", diag)
        step = 1.0
        while True:
            trial = u.copy()
            trial[free] += step * du
            r_trial = _residual(ws, phi, j, fr, trial, epsilon)
            rnorm_trial = ws.dual_norm(r_trial[free])
            if (
                config.line_search == "none"
                or rnorm_trial <= (1.0 - 0.1 * step) * rnorm
                or step <= config.min_step
            ):
                break
            step *= config.contraction_factor
        u, r, rnorm = trial, r_trial, rnorm_trial
        diag.newton_iterations += 1
    if rnorm <= tol + _penalty_certificate_floor(ws, u, epsilon):
        return u
    diag.final_residual = rnorm / max(1.0, ws.load_scale)
    raise NewtonNonconvergence(
        f"no convergence in {config.newton_max_iter} Newton steps "
        f"(residual {rnorm:.3e}, tol {tol:.3e})",
        diag,
    )


def check_smallness(
    spec: ProblemSpec, mesh: TriangulationLevel, constants=None
):
    """Evaluate the uniqueness condition, estimating trace constants on demand."""
    from .lab import problem_constants  # deferred: lab builds on this module

    if constants is None:
        constants = problem_constants(spec, mesh)
    return constants


def solve_penalized(
    spec: ProblemSpec,
    mesh: TriangulationLevel,
    epsilon: float,
    config: SolverConfig | None = None,
    warm_start: np.ndarray | None = None,
    constants=None,
    allow_smallness_violation: bool = False,
    force_generic_terms: bool = False,
) -> DiscreteSolution:
    """Solve the penalized discrete problem at one (mesh, epsilon) cell.

    Returns the coefficient vector on the free dofs whose smoothed
    stationarity residual has load-normalized dual norm below the Newton
    tolerance.  Nonconvergence raises; partial iterates are never returned.
    """
    if epsilon <= 0.0:
        raise InvalidGeometryError("penalty parameter must be positive")
    config = config or SolverConfig()
    if spec.phi.alpha > 0.0 or spec.j.alpha > 0.0:
        constants = check_smallness(spec, mesh, constants)
        if constants.verdict != "satisfied" and not allow_smallness_violation:
            raise SmallnessViolation(
                "uniqueness condition violated "
                f"(margin {constants.smallness_margin:.6g}); "
                "pass allow_smallness_violation=True to proceed"
            )

    ws = _Workspace(spec, mesh)
    phi, j = _effective_terms(spec, force_generic_terms)
    diag = Diagnostics()
    u = ws.dofmap.expand(warm_start) if warm_start is not None else np.zeros(ws.dofmap.n_dofs)

    needs_outer = isinstance(phi, PhiCoulomb) or not isinstance(j, JZero)
    tol = config.newton_tol * max(1.0, ws.load_scale)
    for outer in range(config.fixedpoint_max_iter):
        w = u.copy()
        fr = _freeze(ws, phi, j, w)
        r0 = _residual(ws, phi, j, fr, u, epsilon)
        if ws.dual_norm(r0[ws.free]) <= tol + _penalty_certificate_floor(ws, u, epsilon):
            u_new = u
        else:
            u_new = _newton(ws, phi, j, fr, u, epsilon, config, diag)
        diag.outer_iterations = outer + 1
        update = ws.energy_norm(u_new - w) / max(ws.energy_norm(u_new), 1.0)
        u = u_new
        if not needs_outer or update <= config.fixedpoint_tol:
            fr_true = _freeze(ws, phi, j, u)
            r_true = _residual(ws, phi, j, fr_true, u, epsilon)
            rnorm = ws.dual_norm(r_true[ws.free])
            if rnorm <= tol + _penalty_certificate_floor(ws, u, epsilon):
                diag.final_residual = rnorm / max(1.0, ws.load_scale)
                diag.converged = True
                q = constraint_values_gp(spec.penalty, ws.pen_quad, ws.dofmap, u)
                diag.active_count = int(np.count_nonzero(q > 0.0))
                return DiscreteSolution(
                    coefficients=ws.dofmap.restrict(u),
                    h=mesh.h,
                    epsilon=float(epsilon),
                    diagnostics=diag,
                )
            if not needs_outer:
                diag.final_residual = rnorm / max(1.0, ws.load_scale)
                raise NewtonNonconvergence(
                    "stationarity residual above tolerance after the direct solve", diag
                )
    raise FixedPointNonconvergence(
        f"outer loop did not contract in {config.fixedpoint_max_iter} iterations", diag
    )


def solve_penalized_continuation(
    spec: ProblemSpec,
    mesh: TriangulationLevel,
    epsilon: float,
    config: SolverConfig | None = None,
    constants=None,
    start_epsilon: float = 1e-2,
) -> DiscreteSolution:
    """Warm-started ladder of solves toward a very small penalty parameter."""
    ladder = [epsilon]
    e = epsilon
    while e * 100.0 < start_epsilon:
        e *= 100.0
        ladder.append(e)
    ladder.reverse()
    warm = None
    sol = None
    for eps_k in ladder:
        sol = solve_penalized(
            spec, mesh, eps_k, config, warm_start=warm, constants=constants
        )
        warm = sol.coefficients
    return sol


# ---------------------------------------------------------------------------
# residual audit


@dataclass(frozen=True)
class ResidualBreakdown:
    """Dual norms of the stationarity residual and its individual terms."""

    total: float
    normalized: float
    terms: dict


def residual_check(
    spec: ProblemSpec,
    mesh: TriangulationLevel,
    epsilon: float,
    coefficients: np.ndarray,
) -> ResidualBreakdown:
    """Recompute the smoothed stationarity residual of a candidate solution.

    Independent of the Newton loop bookkeeping: assembles every term at the
    supplied coefficients (frozen arguments evaluated there as well) and
    reports the dual norm of the sum plus each term's own dual norm.
    """
    ws = _Workspace(spec, mesh)
    phi, j = _effective_terms(spec, False)
    u = ws.dofmap.expand(np.asarray(coefficients, dtype=float))
    fr = _freeze(ws, phi, j, u)
    terms = _residual_terms(ws, phi, j, fr, u, epsilon)
    total = ws.dual_norm(sum(terms.values())[ws.free])
    return ResidualBreakdown(
        total=total,
        normalized=total / max(1.0, ws.load_scale),
        terms={k: ws.dual_norm(v[ws.free]) for k, v in terms.items()},
    )


# ---------------------------------------------------------------------------
# constrained oracles


def _constraint_matrix(ws: _Workspace):
    """Rows: normal trace at each contact quadrature point, on free dofs."""
    quad = ws.pen_quad
    dm = ws.dofmap
    e = quad.edges[quad.gp_edge]
    rows, cols, vals = [], [], []
    for i in range(2):
        if dm.dimension == 1:
            rows.append(np.arange(quad.n_points))
            cols.append(e[:, i])
            vals.append(quad.gp_shape[:, i])
        else:
            dirs = quad.normals[quad.gp_edge]
            for c in range(2):
                rows.append(np.arange(quad.n_points))
                cols.append(e[:, i] * 2 + c)
                vals.append(quad.gp_shape[:, i] * dirs[:, c])
    B_full = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(quad.n_points, dm.n_dofs),
    )
    B = B_full[:, ws.free].tocsr()
    bound = constraint_bound_gp(ws.spec.penalty, quad)
    fixed = np.asarray((abs(B) @ np.ones(B.shape[1])) == 0.0).ravel()
    return B, bound, fixed


def _tresca_pieces(ws: _Workspace, phi, u_full):
    if not isinstance(phi, PhiTresca):
        return np.zeros(ws.dofmap.n_dofs), None
    quad = ws.quad(phi.region)
    tr = (
        normal_trace_gp(quad, ws.dofmap, u_full)
        if phi.component == "normal"
        else tangential_trace_gp(quad, ws.dofmap, u_full)
    )
    F = phi.bound_at(quad.gp_x)
    res = scatter_gp(quad, ws.dofmap, F * huber_prime(tr, ws.delta), component=phi.component)
    jac = gp_mass(quad, ws.dofmap, diag=F * huber_second(tr, ws.delta), component=phi.component)
    return res, jac


def solve_constrained_activeset(
    spec: ProblemSpec,
    mesh: TriangulationLevel,
    config: SolverConfig | None = None,
) -> OracleSolution:
    """Primal-dual active set solve of the constrained problem.

    Applies when the nonconvex potential vanishes and the convex term is
    absent or a fixed-bound functional (handled through its smoothing inside
    the Newton loop).  Terminates when the working set repeats; the returned
    point satisfies feasibility and multiplier nonnegativity.
    """
    if not isinstance(spec.j, JZero):
        raise InvalidGeometryError("direct constrained solves need a zero potential")
    if not isinstance(spec.phi, (PhiZero, PhiTresca)):
        raise InvalidGeometryError("direct constrained solves support at most a fixed bound")
    if not isinstance(spec.material, LinearIsotropic):
        raise InvalidGeometryError("direct constrained solves need the linear material")
    config = config or SolverConfig()
    ws = _Workspace(spec, mesh)
    K = ws.linear_matrix[ws.free][:, ws.free].tocsr()
    f = ws.f_full[ws.free]
    B, bound, fixed = _constraint_matrix(ws)
    m = B.shape[0]
    tol = config.newton_tol * max(1.0, ws.load_scale)

    active = np.zeros(m, dtype=bool)
    seen = set()
    lam = np.zeros(m)
    u = np.zeros(ws.free.shape[0])
    for _ in range(100):
        key = active.tobytes()
        if key in seen:
            raise CycleDetected("active set iteration revisited a working set")
        seen.add(key)
        idx = np.flatnonzero(active)
        BA = B[idx]
        nA = idx.shape[0]
        for _ in range(config.newton_max_iter):
            u_full = ws.dofmap.expand(u)
            tres_res, tres_jac = _tresca_pieces(ws, spec.phi, u_full)
            r_u = K @ u + tres_res[ws.free] - f
            if nA:
                r_u = r_u + BA.T @ lam[idx]
                r_c = BA @ u - bound[idx]
            else:
                r_c = np.zeros(0)
            if ws.dual_norm(r_u) + np.linalg.norm(r_c) <= tol:
                break
            Kt = K + tres_jac[ws.free][:, ws.free] if tres_jac is not None else K
            if nA:
                # Adjacent fully-active edges make the quadrature-point rows
                # linearly dependent; a tiny dual regularization keeps the
                # saddle system factorizable at feasibility error O(1e-12).
                reg = -1e-12 * sparse.identity(nA, format="csr")
                sys = sparse.bmat([[Kt, BA.T], [BA, reg]], format="csc")
                rhs = np.concatenate([-r_u, -r_c])
            else:
                sys = Kt.tocsc()
                rhs = -r_u
            try:
                step = splu(sys).solve(rhs)
            except RuntimeError as exc:
                raise LinearSolveFailure(f"constrained system factorization failed: {exc}")
            u = u + step[: u.shape[0]]
            if nA:
                lam[idx] = lam[idx] + step[u.shape[0]:]
        lam[~active] = 0.0
        primal = np.asarray(B @ u).ravel() - bound
        new_active = (lam + primal) > 0.0
        new_active[fixed] = False
        if np.array_equal(new_active, active):
            idx = np.flatnonzero(active)
            return OracleSolution(
                coefficients=u,
                active_set=idx,
                multipliers=lam[idx],
            )
        active = new_active
    raise CycleDetected("active set iteration exceeded its safeguard budget")


def solve_constrained_bruteforce(
    spec: ProblemSpec,
    mesh: TriangulationLevel,
    config: SolverConfig | None = None,
    max_constraints: int = 12,
) -> OracleSolution:
    """Exact constrained minimizer by enumeration of active subsets.

    Strong convexity makes the KKT point unique: the first subset whose
    equality-constrained solution is primal feasible with nonnegative
    multipliers is the minimizer.
    """
    if not isinstance(spec.j, JZero) or not isinstance(spec.phi, PhiZero):
        raise InvalidGeometryError("enumeration applies to the plain constrained case")
    if not isinstance(spec.material, LinearIsotropic):
        raise InvalidGeometryError("enumeration needs the linear material")
    ws = _Workspace(spec, mesh)
    K = ws.linear_matrix[ws.free][:, ws.free].toarray()
    f = ws.f_full[ws.free]
    B_sp, bound, fixed = _constraint_matrix(ws)
    B = B_sp.toarray()
    candidates = np.flatnonzero(~fixed)
    if candidates.shape[0] > max_constraints:
        raise TooManyConstraints(
            f"{candidates.shape[0]} constrained points exceed the enumeration cap"
        )
    n = K.shape[0]
    scale = max(1.0, float(np.abs(f).max(initial=0.0)))
    feas_tol = 1e-9 * scale
    for size in range(candidates.shape[0] + 1):
        for subset in itertools.combinations(candidates.tolist(), size):
            idx = np.array(subset, dtype=int)
            nA = idx.shape[0]
            sys = np.zeros((n + nA, n + nA))
            sys[:n, :n] = K
            if nA:
                sys[:n, n:] = B[idx].T
                sys[n:, :n] = B[idx]
            rhs = np.concatenate([f, bound[idx]])
            try:
                sol = np.linalg.solve(sys, rhs)
            except np.linalg.LinAlgError:
                continue
            u, lam = sol[:n], sol[n:]
            if np.any(B @ u - bound > feas_tol):
                continue
            if nA and np.any(lam < -feas_tol):
                continue
            return OracleSolution(coefficients=u, active_set=idx, multipliers=lam)
    raise NoFeasibleSubset("no active subset yields a feasible KKT point")


# ---------------------------------------------------------------------------
# solution files


def save_solution(sol: DiscreteSolution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"vhi-sol v1 h={float(sol.h)!r} eps={float(sol.epsilon)!r}\n")
        for c in sol.coefficients:
            fh.write(f"{float(c)!r}\n")


def load_solution(path) -> DiscreteSolution:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().strip().split("\n")
    head = lines[0].split()
    if head[:2] != ["vhi-sol", "v1"]:
        raise SolverError(f"bad solution header: {lines[0]!r}")
    h = float(head[2].split("=")[1])
    eps = float(head[3].split("=")[1])
    coeffs = np.array([float(x) for x in lines[1:]])
    return DiscreteSolution(
        coefficients=coeffs,
        h=h,
        epsilon=eps,
        diagnostics=Diagnostics(converged=True, final_residual=np.nan),
    )
