"""Shipped problem instances and their closed-form references.

Each label builds a complete ProblemSpec from scalar parameters; the
experiment configs override individual scalars.  The elastic instances hang
a rectangle from its clamped top edge over the contact zone at the bottom
(the first contact problem adds a bounded-pressure friction device along
the right edge).  The 1D endpoint model has closed-form constrained and
penalized solutions and serves as the analytic regression anchor.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .fem import LinearIsotropic, LoadSpec, NonlinearHencky
from .mesh import RegionTag, build_interval_mesh, build_rectangle_mesh
from .model import (
    JDescendingNormal,
    JSlipWeakening,
    JZero,
    PGapPositive,
    PhiCoulomb,
    PhiTresca,
    PhiZero,
    PNormalPositive,
    PPointConstraint,
    ProblemSpec,
)

DEFAULTS: dict[str, dict[str, float]] = {
    "ScalarSignorini1D": dict(n=2, load=1.0),
    "ScalarObstacle2D": dict(
        nx=2, ny=2, width=1.0, height=1.0,
        load_slope=6.0, load_offset=-2.5, load_wiggle=2.0, load_wiggle_freq=2.0,
        mu=0.5,
    ),
    "VI_only": dict(
        nx=4, ny=2, width=2.0, height=1.0,
        lame_lambda=1.0, lame_mu=1.0,
        body_force_x=0.0, body_force_x_wiggle=2.0, body_force_wiggle_freq=3.0,
        body_force_y=0.3, body_force_y_slope=-0.6,
        traction_x=0.0, traction_y=0.0,
        hencky=0.0, hencky_mu1=0.0, hencky_saturation=0.0,
    ),
    "HVI_only": dict(
        nx=4, ny=2, width=2.0, height=1.0,
        lame_lambda=1.0, lame_mu=1.0,
        body_force_x=0.0, body_force_y=-0.4,
        traction_x=0.0, traction_y=0.0,
        gap=0.02, mu1=4.0, mu2=0.5, r0=0.01, r1=0.03,
    ),
    "P1_contact": dict(
        nx=4, ny=2, width=2.0, height=1.0,
        lame_lambda=1.0, lame_mu=1.0,
        body_force_x=0.3, body_force_y=-0.5,
        traction_x=0.0, traction_y=0.0,
        tresca_bound=0.1, mu_s=0.4, mu_d=0.2, slip_length=0.5,
    ),
    "P2_contact": dict(
        nx=4, ny=2, width=2.0, height=1.0,
        lame_lambda=1.0, lame_mu=1.0,
        body_force_x=0.15, body_force_y=-0.5,
        traction_x=0.0, traction_y=0.0,
        gap=0.02, friction_mu=0.15, slip_cap=0.05,
        mu1=4.0, mu2=0.5, r0=0.01, r1=0.03,
    ),
}


def _material(p: dict) -> LinearIsotropic | NonlinearHencky:
    if p.get("hencky", 0.0):
        return NonlinearHencky(
            mu0=p["lame_mu"], mu1=p["hencky_mu1"], saturation=p["hencky_saturation"]
        )
    return LinearIsotropic(lame_lambda=p["lame_lambda"], lame_mu=p["lame_mu"])


def _hanging_mesh(p: dict, right=RegionTag.NEUMANN):
    """Rectangle clamped along the top, contact along the bottom."""
    return build_rectangle_mesh(
        p["width"], p["height"], int(p["nx"]), int(p["ny"]),
        {
            "top": RegionTag.DIRICHLET,
            "left": RegionTag.NEUMANN,
            "right": right,
            "bottom": RegionTag.CONTACT1,
        },
    )


def build_problem(label: str, overrides: dict | None = None) -> ProblemSpec:
    if label not in DEFAULTS:
        raise ConfigError(f"unknown problem label {label!r}")
    p = dict(DEFAULTS[label])
    for key, val in (overrides or {}).items():
        if key not in p:
            raise ConfigError(f"unknown parameter {key!r} for problem {label}")
        p[key] = float(val)

    if label == "ScalarSignorini1D":
        mesh = build_interval_mesh(int(p["n"]))
        return ProblemSpec(
            label=label, mesh=mesh, dimension=1,
            material=LinearIsotropic(0.0, 0.5),
            loads=LoadSpec(body_force=p["load"]),
            phi=PhiZero(), j=JZero(), penalty=PPointConstraint(),
        )

    if label == "ScalarObstacle2D":
        mesh = build_rectangle_mesh(
            p["width"], p["height"], int(p["nx"]), int(p["ny"]),
            {
                "left": RegionTag.NEUMANN,
                "right": RegionTag.NEUMANN,
                "top": RegionTag.DIRICHLET,
                "bottom": RegionTag.CONTACT1,
            },
        )
        slope, offset = p["load_slope"], p["load_offset"]
        wig, freq = p["load_wiggle"], p["load_wiggle_freq"]
        return ProblemSpec(
            label=label, mesh=mesh, dimension=1,
            material=LinearIsotropic(0.0, p["mu"]),
            loads=LoadSpec(
                body_force=lambda x: slope * x[:, 0] + offset
                + wig * np.sin(freq * np.pi * x[:, 0])
            ),
            phi=PhiZero(), j=JZero(),
            penalty=PNormalPositive(region=RegionTag.CONTACT1),
        )

    if label == "VI_only":
        fx, fy, fy_slope = p["body_force_x"], p["body_force_y"], p["body_force_y_slope"]
        wig, freq = p["body_force_x_wiggle"], p["body_force_wiggle_freq"]
        loads = LoadSpec(
            body_force=lambda x: np.column_stack(
                [fx + wig * np.sin(freq * np.pi * x[:, 0]), fy + fy_slope * x[:, 0]]
            ),
            traction=(p["traction_x"], p["traction_y"]),
        )
        mesh = _hanging_mesh(p)
        return ProblemSpec(
            label=label, mesh=mesh, dimension=2,
            material=_material(p), loads=loads,
            phi=PhiZero(), j=JZero(),
            penalty=PNormalPositive(region=RegionTag.CONTACT1),
        )

    loads = LoadSpec(
        body_force=(p["body_force_x"], p["body_force_y"]),
        traction=(p["traction_x"], p["traction_y"]),
    )

    if label == "HVI_only":
        mesh = _hanging_mesh(p)
        return ProblemSpec(
            label=label, mesh=mesh, dimension=2,
            material=LinearIsotropic(p["lame_lambda"], p["lame_mu"]), loads=loads,
            phi=PhiZero(),
            j=JDescendingNormal(
                mu1=p["mu1"], mu2=p["mu2"], r0=p["r0"], r1=p["r1"],
                region=RegionTag.CONTACT1,
            ),
            penalty=PGapPositive(gap=p["gap"], region=RegionTag.CONTACT1),
        )

    if label == "P1_contact":
        mesh = _hanging_mesh(p, right=RegionTag.CONTACT2)
        return ProblemSpec(
            label=label, mesh=mesh, dimension=2,
            material=LinearIsotropic(p["lame_lambda"], p["lame_mu"]), loads=loads,
            phi=PhiTresca(
                bound=p["tresca_bound"], component="normal", region=RegionTag.CONTACT2
            ),
            j=JSlipWeakening(
                mu_s=p["mu_s"], mu_d=p["mu_d"], L_s=p["slip_length"],
                region=RegionTag.CONTACT2,
            ),
            penalty=PNormalPositive(region=RegionTag.CONTACT1),
        )

    mesh = _hanging_mesh(p)
    return ProblemSpec(
        label=label, mesh=mesh, dimension=2,
        material=LinearIsotropic(p["lame_lambda"], p["lame_mu"]), loads=loads,
        phi=PhiCoulomb(
            friction_mu=p["friction_mu"], slip_cap=p["slip_cap"],
            region=RegionTag.CONTACT1,
        ),
        j=JDescendingNormal(
            mu1=p["mu1"], mu2=p["mu2"], r0=p["r0"], r1=p["r1"],
            region=RegionTag.CONTACT1,
        ),
        penalty=PGapPositive(gap=p["gap"], region=RegionTag.CONTACT1),
    )


def analytic_solution(label: str, load: float = 1.0):
    """Constrained limit solution as a nodal evaluation function, if known."""
    if label == "ScalarSignorini1D":
        return lambda pts: load * 0.5 * (pts[:, 0] - pts[:, 0] ** 2)
    return None


def analytic_penalized_1d(eps: float, load: float = 1.0):
    """Closed-form penalized solution of the 1D endpoint model."""
    a = load * (2.0 * eps + 1.0) / (2.0 * (eps + 1.0))
    return lambda pts: -load * pts[:, 0] ** 2 / 2.0 + a * pts[:, 0]


def analytic_endpoint_violation(eps: float, load: float = 1.0) -> float:
    return load * eps / (2.0 * (eps + 1.0))
