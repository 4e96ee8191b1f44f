"""Problem ingredients for the constrained inequality solves.

A problem couples a monotone stress operator with three boundary
ingredients on the contact zones: a convex (possibly nonsmooth) functional,
a locally Lipschitz and generally nonconvex potential entering through its
directional derivative, and a penalty operator whose kernel is exactly the
discrete constraint set at the edge quadrature points.

Every concrete ingredient stores its verifiable constants (growth bounds,
relaxed monotonicity, Lipschitz bound of the friction coefficient) so the
uniqueness/contraction condition can be evaluated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AssemblyError, InvalidGeometryError
from .fem import (
    ContactQuadrature,
    DofMap,
    LoadSpec,
    MaterialLaw,
    contact_quadrature,
    gp_mass,
    normal_trace_gp,
    scatter_gp,
    tangential_trace_gp,
)
from .mesh import RegionTag, TriangulationLevel


# ---------------------------------------------------------------------------
# smoothed absolute value


def huber(r: np.ndarray, delta: float) -> np.ndarray:
    """Convex surrogate of ``|r|``: ``sqrt(r^2 + delta^2) - delta``."""
    if delta == 0.0:
        return np.abs(r)
    return np.sqrt(r * r + delta * delta) - delta


def huber_prime(r: np.ndarray, delta: float) -> np.ndarray:
    if delta == 0.0:
        return np.sign(r)
    return r / np.sqrt(r * r + delta * delta)


def huber_second(r: np.ndarray, delta: float) -> np.ndarray:
    if delta == 0.0:
        return np.zeros_like(r)
    return delta * delta / np.power(r * r + delta * delta, 1.5)


# ---------------------------------------------------------------------------
# convex functional


@dataclass(frozen=True)
class PhiZero:
    smoothing_delta: float | None = None

    @property
    def alpha(self) -> float:
        return 0.0


@dataclass(frozen=True)
class PhiTresca:
    """Fixed nonnegative bound against the magnitude of one trace component.

    ``component`` selects which trace the bound acts on: ``normal`` for the
    limited-pressure device zone, ``tangential`` for classical given-bound
    friction.  The bound may vary with position.
    """

    bound: object = 0.0
    component: str = "normal"
    region: RegionTag = RegionTag.CONTACT2
    smoothing_delta: float | None = None

    def __post_init__(self):
        if self.component not in ("normal", "tangential"):
            raise InvalidGeometryError("component must be 'normal' or 'tangential'")
        if not callable(self.bound) and float(self.bound) < 0.0:
            raise InvalidGeometryError("the bound must be nonnegative")

    def bound_at(self, x: np.ndarray) -> np.ndarray:
        vals = self.bound(x) if callable(self.bound) else np.full(x.shape[0], float(self.bound))
        vals = np.asarray(vals, dtype=float)
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
            raise AssemblyError("bound must be finite and nonnegative on the region")
        return vals

    @property
    def alpha(self) -> float:
        return 0.0


@dataclass(frozen=True)
class PhiCoulomb:
    """Friction bound depending on the normal displacement of the first argument.

    The coefficient is ``friction_mu * clip(r, 0, slip_cap)``: zero without
    penetration pressure, Lipschitz in ``r`` with constant ``friction_mu``,
    saturating at ``slip_cap``.
    """

    friction_mu: float
    slip_cap: float = np.inf
    region: RegionTag = RegionTag.CONTACT1
    smoothing_delta: float | None = None

    def __post_init__(self):
        if self.friction_mu < 0.0 or self.slip_cap <= 0.0:
            raise InvalidGeometryError("need friction_mu >= 0 and slip_cap > 0")

    def bound_of(self, r: np.ndarray) -> np.ndarray:
        return self.friction_mu * np.clip(r, 0.0, self.slip_cap)

    @property
    def alpha(self) -> float:
        return self.friction_mu


PhiSpec = PhiZero | PhiTresca | PhiCoulomb


def phi_value(
    spec: PhiSpec,
    quad: ContactQuadrature | None,
    dofmap: DofMap,
    w_full: np.ndarray,
    v_full: np.ndarray,
    delta: float | None = None,
) -> float:
    """Value of the convex functional at (trace of w, trace of v).

    When a smoothing radius is active the nonsmooth magnitudes are replaced
    by their convex surrogate, which converges to the exact value from below
    as the radius shrinks.
    """
    if isinstance(spec, PhiZero):
        return 0.0
    if w_full.shape != v_full.shape:
        raise AssemblyError("trace arguments must have identical sizes")
    d = spec.smoothing_delta if delta is None else delta
    d = 0.0 if d is None else d
    if isinstance(spec, PhiTresca):
        vals = (
            normal_trace_gp(quad, dofmap, v_full)
            if spec.component == "normal"
            else tangential_trace_gp(quad, dofmap, v_full)
        )
        return float(np.sum(quad.gp_w * spec.bound_at(quad.gp_x) * huber(vals, d)))
    w_nu = normal_trace_gp(quad, dofmap, w_full)
    v_t = tangential_trace_gp(quad, dofmap, v_full)
    return float(np.sum(quad.gp_w * spec.bound_of(w_nu) * huber(v_t, d)))


# ---------------------------------------------------------------------------
# nonconvex potential


@dataclass(frozen=True)
class JZero:
    @property
    def alpha(self) -> float:
        return 0.0

    growth_c0 = 0.0
    growth_c1 = 0.0


@dataclass(frozen=True)
class JSlipWeakening:
    """Tangential potential whose slope weakens with accumulated slip.

    Density ``rho(|xi|)`` with ``rho'(s) = mu_s - (mu_s - mu_d)*min(s/L_s, 1)``:
    static coefficient ``mu_s`` decaying linearly to the dynamic coefficient
    ``mu_d`` over the weakening length ``L_s``.  Relaxed monotonicity holds
    with constant ``(mu_s - mu_d)/L_s``; the slope never exceeds ``mu_s``.
    """

    mu_s: float
    mu_d: float
    L_s: float
    region: RegionTag = RegionTag.CONTACT2

    def __post_init__(self):
        if not (self.mu_s >= self.mu_d >= 0.0):
            raise InvalidGeometryError("need mu_s >= mu_d >= 0")
        if self.L_s <= 0.0:
            raise InvalidGeometryError("weakening length must be positive")

    @property
    def alpha(self) -> float:
        return (self.mu_s - self.mu_d) / self.L_s

    @property
    def growth_c0(self) -> float:
        return self.mu_s

    growth_c1 = 0.0

    def rho_prime(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.mu_s - (self.mu_s - self.mu_d) * np.minimum(s / self.L_s, 1.0)

    def j0(self, xi: np.ndarray, d: np.ndarray) -> np.ndarray:
        """Pointwise directional derivative for 2-vector slips ``xi``."""
        xi = np.atleast_2d(xi)
        d = np.atleast_2d(d)
        s = np.linalg.norm(xi, axis=-1)
        out = np.empty(s.shape)
        at0 = s == 0.0
        out[at0] = self.mu_s * np.linalg.norm(d[at0], axis=-1)
        ok = ~at0
        out[ok] = self.rho_prime(s[ok]) * np.einsum("qd,qd->q", xi[ok], d[ok]) / s[ok]
        return out


@dataclass(frozen=True)
class JDescendingNormal:
    """Normal compliance potential with a softening (descending) branch.

    The derivative rises with stiffness ``mu1`` up to ``r0``, descends with
    slope ``mu2`` until ``r1`` and stays constant beyond.  The descending
    slope is the relaxed monotonicity constant; the peak ``mu1*r0`` bounds
    the derivative magnitude, which the constructor guarantees by requiring
    ``mu2*(r1 - r0) <= 2*mu1*r0``.
    """

    mu1: float
    mu2: float
    r0: float
    r1: float
    region: RegionTag = RegionTag.CONTACT1

    def __post_init__(self):
        if self.mu1 <= 0.0 or self.mu2 < 0.0:
            raise InvalidGeometryError("need mu1 > 0 and mu2 >= 0")
        if not (0.0 < self.r0 < self.r1):
            raise InvalidGeometryError("need 0 < r0 < r1")
        if self.mu2 * (self.r1 - self.r0) > 2.0 * self.mu1 * self.r0:
            raise InvalidGeometryError(
                "descending branch drops below the stored derivative bound"
            )

    @property
    def alpha(self) -> float:
        return self.mu2

    @property
    def growth_c0(self) -> float:
        return self.mu1 * self.r0

    growth_c1 = 0.0

    @property
    def tail_value(self) -> float:
        return max(self.mu1 * self.r0 - self.mu2 * (self.r1 - self.r0), 0.0)

    def p(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rising = self.mu1 * np.clip(r, 0.0, self.r0)
        drop = self.mu2 * np.clip(r - self.r0, 0.0, self.r1 - self.r0)
        out = rising - drop
        return np.where(r > self.r1, self.tail_value, out)

    def p_one_sided(self, r: float) -> tuple[float, float]:
        left = float(self.p(np.nextafter(r, -np.inf)))
        right = float(self.p(np.nextafter(r, np.inf)))
        return left, right

    def branch(self, r: np.ndarray) -> np.ndarray:
        """0: slack, 1: rising, 2: descending, 3: flat tail."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape, dtype=np.int64)
        out[(r >= 0.0) & (r <= self.r0)] = 1
        out[(r > self.r0) & (r <= self.r1)] = 2
        out[r > self.r1] = 3
        return out

    def branch_slope_intercept(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        b = self.branch(r)
        slope = np.choose(b, [0.0, self.mu1, -self.mu2, 0.0])
        intercept = np.choose(
            b, [0.0, 0.0, self.mu1 * self.r0 + self.mu2 * self.r0, self.tail_value]
        )
        return slope, intercept

    def j0(self, r: np.ndarray, d: np.ndarray) -> np.ndarray:
        """Pointwise directional derivative, upper branch at the kinks."""
        r = np.asarray(r, dtype=float)
        d = np.asarray(d, dtype=float)
        lo = self.p(np.nextafter(r, -np.inf))
        hi = self.p(np.nextafter(r, np.inf))
        return np.maximum(lo * d, hi * d)


JSpec = JZero | JSlipWeakening | JDescendingNormal


def j_directional(
    spec: JSpec,
    quad: ContactQuadrature | None,
    dofmap: DofMap,
    u_full: np.ndarray,
    d_full: np.ndarray,
) -> float:
    """Integrated directional derivative of the potential at u toward d."""
    if isinstance(spec, JZero):
        return 0.0
    if isinstance(spec, JDescendingNormal):
        r = normal_trace_gp(quad, dofmap, u_full)
        dd = normal_trace_gp(quad, dofmap, d_full)
        return float(np.sum(quad.gp_w * spec.j0(r, dd)))
    u_t = tangential_trace_gp(quad, dofmap, u_full)
    d_t = tangential_trace_gp(quad, dofmap, d_full)
    tau = quad.tangents[quad.gp_edge]
    vals = spec.j0(u_t[:, None] * tau, d_t[:, None] * tau)
    return float(np.sum(quad.gp_w * vals))


# ---------------------------------------------------------------------------
# penalty operators


@dataclass(frozen=True)
class PNormalPositive:
    """Positive part of the normal trace; kernel = nonpositive normal trace."""

    region: RegionTag = RegionTag.CONTACT1


@dataclass(frozen=True)
class PGapPositive:
    """Positive part of the normal trace beyond a nonnegative gap field."""

    gap: object = 0.0
    region: RegionTag = RegionTag.CONTACT1

    def __post_init__(self):
        if not callable(self.gap) and float(self.gap) < 0.0:
            raise InvalidGeometryError("gap must be nonnegative")

    def gap_at(self, x: np.ndarray) -> np.ndarray:
        vals = self.gap(x) if callable(self.gap) else np.full(x.shape[0], float(self.gap))
        vals = np.asarray(vals, dtype=float)
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
            raise AssemblyError("gap must be finite and nonnegative on the region")
        return vals


@dataclass(frozen=True)
class PPointConstraint:
    """1D endpoint constraint: positive part of the value at the tagged node."""

    region: RegionTag = RegionTag.CONTACT1


PenaltySpec = PNormalPositive | PGapPositive | PPointConstraint


def constraint_bound_gp(spec: PenaltySpec, quad: ContactQuadrature) -> np.ndarray:
    if isinstance(spec, PGapPositive):
        return spec.gap_at(quad.gp_x)
    return np.zeros(quad.n_points)


def constraint_values_gp(
    spec: PenaltySpec,
    quad: ContactQuadrature,
    dofmap: DofMap,
    u_full: np.ndarray,
    precise: bool = False,
) -> np.ndarray:
    """Constraint quantity at quadrature points; feasible iff <= 0.

    With ``precise`` the trace and the gap subtraction are evaluated in
    extended precision: near the constrained solution the quantity is a
    difference of nearly equal numbers, and the penalty term divides it by
    an epsilon as small as 1e-10, so double-precision cancellation noise
    would otherwise dominate the scaled residual.
    """
    if not precise:
        return normal_trace_gp(quad, dofmap, u_full) - constraint_bound_gp(spec, quad)
    e = quad.edges[quad.gp_edge]
    shape = quad.gp_shape.astype(np.longdouble)
    if dofmap.dimension == 1:
        uu = u_full.astype(np.longdouble)
        tr = uu[e[:, 0]] * shape[:, 0] + uu[e[:, 1]] * shape[:, 1]
    else:
        disp = u_full.reshape(-1, 2).astype(np.longdouble)
        at_gp = disp[e[:, 0]] * shape[:, 0, None] + disp[e[:, 1]] * shape[:, 1, None]
        tr = np.einsum("qd,qd->q", at_gp, quad.normals[quad.gp_edge].astype(np.longdouble))
    return tr - constraint_bound_gp(spec, quad).astype(np.longdouble)


def penalty_residual(
    spec: PenaltySpec, quad: ContactQuadrature, dofmap: DofMap, u_full: np.ndarray
) -> np.ndarray:
    """Dual representation of the penalty operator at ``u``.

    Vanishes exactly when the constraint holds at every quadrature point:
    each entry is a nonnegative combination of pointwise positive parts.
    """
    q = constraint_values_gp(spec, quad, dofmap, u_full, precise=True)
    vals = np.maximum(q, 0.0).astype(float)
    return scatter_gp(quad, dofmap, vals, component="normal")


def penalty_jacobian(
    spec: PenaltySpec, quad: ContactQuadrature, dofmap: DofMap, u_full: np.ndarray
):
    """One generalized derivative of the penalty residual.

    Pointwise slope 1 where the constraint quantity is strictly positive and
    0 otherwise (the kink at zero is classified inactive), weighted into the
    normal-component quadrature mass.
    """
    q = constraint_values_gp(spec, quad, dofmap, u_full)
    return gp_mass(quad, dofmap, diag=(q > 0.0).astype(float), component="normal")


def penalty_quadrature(mesh: TriangulationLevel, spec: PenaltySpec) -> ContactQuadrature:
    quad = contact_quadrature(mesh, spec.region)
    if isinstance(spec, PPointConstraint) and not quad.point_mode:
        raise AssemblyError("point constraints apply to interval meshes only")
    if not isinstance(spec, PPointConstraint) and quad.point_mode:
        raise AssemblyError("edge-based penalty requested on an interval mesh")
    return quad


# ---------------------------------------------------------------------------
# full problem description


LABELS = (
    "P1_contact",
    "P2_contact",
    "ScalarSignorini1D",
    "ScalarObstacle2D",
    "VI_only",
    "HVI_only",
)


@dataclass(frozen=True)
class ProblemSpec:
    """Everything a solve needs: geometry, material, loads, and the three
    boundary ingredients, plus a label pinning the intended structure."""

    label: str
    mesh: TriangulationLevel
    dimension: int
    material: MaterialLaw
    loads: LoadSpec
    phi: PhiSpec
    j: JSpec
    penalty: PenaltySpec

    def __post_init__(self):
        if self.label not in LABELS:
            raise InvalidGeometryError(f"unknown problem label {self.label!r}")
        if self.label == "VI_only" and not isinstance(self.j, JZero):
            raise InvalidGeometryError("VI_only requires a zero potential")
        if self.label == "HVI_only" and not isinstance(self.phi, PhiZero):
            raise InvalidGeometryError("HVI_only requires a zero convex functional")
        if self.label == "P1_contact":
            if not (
                isinstance(self.phi, PhiTresca)
                and isinstance(self.j, JSlipWeakening)
                and isinstance(self.penalty, PNormalPositive)
                and self.dimension == 2
            ):
                raise InvalidGeometryError(
                    "P1_contact pairs the fixed normal bound with slip weakening "
                    "and the rigid-zone penalty"
                )
        if self.label == "P2_contact":
            if not (
                isinstance(self.phi, PhiCoulomb)
                and isinstance(self.j, JDescendingNormal)
                and isinstance(self.penalty, PGapPositive)
                and self.dimension == 2
            ):
                raise InvalidGeometryError(
                    "P2_contact pairs the displacement-dependent friction bound "
                    "with the softening normal potential and the gap penalty"
                )
        if self.label == "ScalarSignorini1D":
            if self.mesh.dim != 1 or self.dimension != 1 or not isinstance(
                self.penalty, PPointConstraint
            ):
                raise InvalidGeometryError("ScalarSignorini1D is the 1D endpoint model")
        if self.label == "ScalarObstacle2D":
            if self.mesh.dim != 2 or self.dimension != 1 or not isinstance(self.j, JZero):
                raise InvalidGeometryError("ScalarObstacle2D is a scalar 2D VI instance")
        if self.mesh.dim == 1 and self.dimension != 1:
            raise InvalidGeometryError("interval meshes carry scalar problems only")

    def effective_delta(self, h: float) -> float:
        """Smoothing radius policy: explicit value if given, else h^2."""
        explicit = getattr(self.phi, "smoothing_delta", None)
        return float(explicit) if explicit is not None else h * h


@dataclass(frozen=True)
class ConstantsReport:
    """Measured trace constants and the uniqueness-condition verdict."""

    label: str
    lambda_1V: float
    lambda_1nuV: float
    c_phi: float
    c_j: float
    m_A: float
    alpha_phi: float
    alpha_j: float
    smallness_margin: float
    verdict: str


def report_constants(
    spec: ProblemSpec, lambda_full: float, lambda_normal: float
) -> ConstantsReport:
    """Evaluate the applicable smallness inequality.

    ``lambda_full`` bounds the full (or tangential) trace, ``lambda_normal``
    the normal trace; the slip-weakening tangential constant is bounded from
    above through the full-trace eigenvalue, which makes the margin
    conservative for that ingredient.
    """
    if lambda_full <= 0.0 or lambda_normal <= 0.0:
        raise AssemblyError("missing or invalid trace eigenvalue estimates")
    m_a = spec.material.monotonicity_constant
    alpha_phi = spec.phi.alpha
    alpha_j = spec.j.alpha
    c_phi = 1.0 / np.sqrt(lambda_full)
    c_j = (
        1.0 / np.sqrt(lambda_normal)
        if isinstance(spec.j, JDescendingNormal)
        else 1.0 / np.sqrt(lambda_full)
    )
    margin = m_a - alpha_phi * c_phi**2 - alpha_j * c_j**2
    return ConstantsReport(
        label=spec.label,
        lambda_1V=float(lambda_full),
        lambda_1nuV=float(lambda_normal),
        c_phi=float(c_phi),
        c_j=float(c_j),
        m_A=float(m_a),
        alpha_phi=float(alpha_phi),
        alpha_j=float(alpha_j),
        smallness_margin=float(margin),
        verdict="satisfied" if margin > 0.0 else "violated",
    )
