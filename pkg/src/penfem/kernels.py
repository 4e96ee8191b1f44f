"""Hot assembly kernels in two interchangeable backends.

Every kernel exists as a pure-numpy implementation and a numba ``@njit``
translation of the same loop nest.  The active backend is chosen once at
import time: numba when available, the numpy path when the environment
variable ``PENFEM_PURE_NUMPY`` is set to a truthy value (or numba is not
installed).  ``benchmarks/bench_kernels.py`` times both paths side by side.

Kernel contracts (shared by both backends):

``tri_geometry(verts, tris) -> (area, grads)``
    area[t] is the positive triangle area, grads[t, i, :] the constant
    gradient of the nodal hat function of local vertex ``i``.

``scalar_stiffness_local(area, grads, coef) -> (T, 3, 3)``
    Local matrices of ``coef * grad(u) . grad(v)``.

``elastic_stiffness_local(area, grads, lam, mu) -> (T, 6, 6)``
    Local matrices of the linear isotropic stress pairing, local dof
    ordering ``(node, component)`` flattened row-major.

``scalar_saturating_flux(area, grads, u_loc, mu0, mu1, kappa)``
``elastic_saturating_stress(area, grads, u_loc, mu0, mu1, kappa)``
    Residual contributions and tangent local matrices for the saturating
    (strain-softening modulus) material ``2*(mu0 + mu1/(1 + kappa*|e|)) e``.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("PENFEM_PURE_NUMPY", "0").strip().lower()
_WANT_NUMBA = _FLAG not in ("1", "true", "yes", "on")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAS_NUMBA and _WANT_NUMBA


# ---------------------------------------------------------------------------
# numpy backend


def tri_geometry_numpy(verts, tris):
    p0 = verts[tris[:, 0]]
    p1 = verts[tris[:, 1]]
    p2 = verts[tris[:, 2]]
    e01 = p1 - p0
    e02 = p2 - p0
    twice = e01[:, 0] * e02[:, 1] - e01[:, 1] * e02[:, 0]
    area = 0.5 * twice
    grads = np.empty((tris.shape[0], 3, 2))
    # grad of hat_i is the inward rotation of the opposite edge over 2*area
    grads[:, 0, 0] = p1[:, 1] - p2[:, 1]
    grads[:, 0, 1] = p2[:, 0] - p1[:, 0]
    grads[:, 1, 0] = p2[:, 1] - p0[:, 1]
    grads[:, 1, 1] = p0[:, 0] - p2[:, 0]
    grads[:, 2, 0] = p0[:, 1] - p1[:, 1]
    grads[:, 2, 1] = p1[:, 0] - p0[:, 0]
    grads /= twice[:, None, None]
    return area, grads


def scalar_stiffness_local_numpy(area, grads, coef):
    return coef * area[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)


def elastic_stiffness_local_numpy(area, grads, lam, mu):
    T = area.shape[0]
    gx = grads[:, :, 0]
    gy = grads[:, :, 1]
    B = np.zeros((T, 3, 6))
    for i in range(3):
        B[:, 0, 2 * i] = gx[:, i]
        B[:, 1, 2 * i + 1] = gy[:, i]
        B[:, 2, 2 * i] = gy[:, i]
        B[:, 2, 2 * i + 1] = gx[:, i]
    D = np.array(
        [[2.0 * mu + lam, lam, 0.0], [lam, 2.0 * mu + lam, 0.0], [0.0, 0.0, mu]]
    )
    return area[:, None, None] * np.einsum("tki,kl,tlj->tij", B, D, B)


def scalar_saturating_flux_numpy(area, grads, u_loc, mu0, mu1, kappa):
    g = np.einsum("ti,tid->td", u_loc, grads)
    s = np.sqrt(g[:, 0] ** 2 + g[:, 1] ** 2)
    c = 2.0 * (mu0 + mu1 / (1.0 + kappa * s))
    cp = -2.0 * mu1 * kappa / (1.0 + kappa * s) ** 2
    res = area[:, None] * c[:, None] * np.einsum("td,tid->ti", g, grads)
    tan = c[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    proj = np.einsum("td,tid->ti", g, grads)
    safe = s > 1e-300
    ratio = np.where(safe, cp / np.where(safe, s, 1.0), 0.0)
    tan += ratio[:, None, None] * proj[:, :, None] * proj[:, None, :]
    tan *= area[:, None, None]
    return res, tan


def elastic_saturating_stress_numpy(area, grads, u_loc, mu0, mu1, kappa):
    T = area.shape[0]
    gx = grads[:, :, 0]
    gy = grads[:, :, 1]
    exx = np.einsum("ti,ti->t", u_loc[:, :, 0], gx)
    eyy = np.einsum("ti,ti->t", u_loc[:, :, 1], gy)
    exy = 0.5 * (
        np.einsum("ti,ti->t", u_loc[:, :, 0], gy)
        + np.einsum("ti,ti->t", u_loc[:, :, 1], gx)
    )
    s = np.sqrt(exx**2 + eyy**2 + 2.0 * exy**2)
    c = 2.0 * (mu0 + mu1 / (1.0 + kappa * s))
    cp = -2.0 * mu1 * kappa / (1.0 + kappa * s) ** 2
    sxx = c * exx
    syy = c * eyy
    sxy = c * exy
    res = np.empty((T, 3, 2))
    res[:, :, 0] = area[:, None] * (sxx[:, None] * gx + sxy[:, None] * gy)
    res[:, :, 1] = area[:, None] * (sxy[:, None] * gx + syy[:, None] * gy)

    B = np.zeros((T, 3, 6))
    for i in range(3):
        B[:, 0, 2 * i] = gx[:, i]
        B[:, 1, 2 * i + 1] = gy[:, i]
        B[:, 2, 2 * i] = gy[:, i]
        B[:, 2, 2 * i + 1] = gx[:, i]
    base = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]])
    D = c[:, None, None] * base[None, :, :]
    w = np.stack([exx, eyy, exy], axis=1)
    safe = s > 1e-300
    ratio = np.where(safe, cp / np.where(safe, s, 1.0), 0.0)
    D += ratio[:, None, None] * w[:, :, None] * w[:, None, :]
    tan = area[:, None, None] * np.einsum("tki,tkl,tlj->tij", B, D, B)
    return res, tan


# ---------------------------------------------------------------------------
# numba backend (same math, explicit loops)


@njit(cache=True)
def _tri_geometry_loop(verts, tris):
    T = tris.shape[0]
    area = np.empty(T)
    grads = np.empty((T, 3, 2))
    for t in range(T):
        a = tris[t, 0]
        b = tris[t, 1]
        c = tris[t, 2]
        x0, y0 = verts[a, 0], verts[a, 1]
        x1, y1 = verts[b, 0], verts[b, 1]
        x2, y2 = verts[c, 0], verts[c, 1]
        twice = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        area[t] = 0.5 * twice
        grads[t, 0, 0] = (y1 - y2) / twice
        grads[t, 0, 1] = (x2 - x1) / twice
        grads[t, 1, 0] = (y2 - y0) / twice
        grads[t, 1, 1] = (x0 - x2) / twice
        grads[t, 2, 0] = (y0 - y1) / twice
        grads[t, 2, 1] = (x1 - x0) / twice
    return area, grads


@njit(cache=True)
def _scalar_stiffness_loop(area, grads, coef):
    T = area.shape[0]
    out = np.empty((T, 3, 3))
    for t in range(T):
        for i in range(3):
            for j in range(3):
                dot = (
                    grads[t, i, 0] * grads[t, j, 0] + grads[t, i, 1] * grads[t, j, 1]
                )
                out[t, i, j] = coef * area[t] * dot
    return out


@njit(cache=True)
def _elastic_stiffness_loop(area, grads, lam, mu):
    T = area.shape[0]
    out = np.zeros((T, 6, 6))
    for t in range(T):
        for i in range(3):
            gxi = grads[t, i, 0]
            gyi = grads[t, i, 1]
            for j in range(3):
                gxj = grads[t, j, 0]
                gyj = grads[t, j, 1]
                # (node i, comp a) vs (node j, comp b) pairing of the
                # isotropic stress with symmetrized gradients
                kxx = (2.0 * mu + lam) * gxi * gxj + mu * gyi * gyj
                kyy = (2.0 * mu + lam) * gyi * gyj + mu * gxi * gxj
                kxy = lam * gxi * gyj + mu * gyi * gxj
                kyx = lam * gyi * gxj + mu * gxi * gyj
                out[t, 2 * i, 2 * j] = area[t] * kxx
                out[t, 2 * i, 2 * j + 1] = area[t] * kxy
                out[t, 2 * i + 1, 2 * j] = area[t] * kyx
                out[t, 2 * i + 1, 2 * j + 1] = area[t] * kyy
    return out


@njit(cache=True)
def _scalar_saturating_loop(area, grads, u_loc, mu0, mu1, kappa):
    T = area.shape[0]
    res = np.zeros((T, 3))
    tan = np.zeros((T, 3, 3))
    for t in range(T):
        gx = 0.0
        gy = 0.0
        for i in range(3):
            gx += u_loc[t, i] * grads[t, i, 0]
            gy += u_loc[t, i] * grads[t, i, 1]
        s = np.sqrt(gx * gx + gy * gy)
        c = 2.0 * (mu0 + mu1 / (1.0 + kappa * s))
        cp = -2.0 * mu1 * kappa / (1.0 + kappa * s) ** 2
        for i in range(3):
            res[t, i] = area[t] * c * (gx * grads[t, i, 0] + gy * grads[t, i, 1])
        for i in range(3):
            pi = gx * grads[t, i, 0] + gy * grads[t, i, 1]
            for j in range(3):
                pj = gx * grads[t, j, 0] + gy * grads[t, j, 1]
                dot = (
                    grads[t, i, 0] * grads[t, j, 0] + grads[t, i, 1] * grads[t, j, 1]
                )
                val = c * dot
                if s > 1e-300:
                    val += cp / s * pi * pj
                tan[t, i, j] = area[t] * val
    return res, tan


@njit(cache=True)
def _elastic_saturating_loop(area, grads, u_loc, mu0, mu1, kappa):
    T = area.shape[0]
    res = np.zeros((T, 3, 2))
    tan = np.zeros((T, 6, 6))
    B = np.zeros((3, 6))
    D = np.zeros((3, 3))
    for t in range(T):
        exx = 0.0
        eyy = 0.0
        exy = 0.0
        for i in range(3):
            exx += u_loc[t, i, 0] * grads[t, i, 0]
            eyy += u_loc[t, i, 1] * grads[t, i, 1]
            exy += 0.5 * (
                u_loc[t, i, 0] * grads[t, i, 1] + u_loc[t, i, 1] * grads[t, i, 0]
            )
        s = np.sqrt(exx * exx + eyy * eyy + 2.0 * exy * exy)
        c = 2.0 * (mu0 + mu1 / (1.0 + kappa * s))
        cp = -2.0 * mu1 * kappa / (1.0 + kappa * s) ** 2
        sxx = c * exx
        syy = c * eyy
        sxy = c * exy
        for i in range(3):
            res[t, i, 0] = area[t] * (sxx * grads[t, i, 0] + sxy * grads[t, i, 1])
            res[t, i, 1] = area[t] * (sxy * grads[t, i, 0] + syy * grads[t, i, 1])
        for i in range(3):
            B[0, 2 * i] = grads[t, i, 0]
            B[0, 2 * i + 1] = 0.0
            B[1, 2 * i] = 0.0
            B[1, 2 * i + 1] = grads[t, i, 1]
            B[2, 2 * i] = grads[t, i, 1]
            B[2, 2 * i + 1] = grads[t, i, 0]
        D[0, 0] = c
        D[0, 1] = 0.0
        D[0, 2] = 0.0
        D[1, 0] = 0.0
        D[1, 1] = c
        D[1, 2] = 0.0
        D[2, 0] = 0.0
        D[2, 1] = 0.0
        D[2, 2] = 0.5 * c
        if s > 1e-300:
            r = cp / s
            w0, w1, w2 = exx, eyy, exy
            D[0, 0] += r * w0 * w0
            D[0, 1] += r * w0 * w1
            D[0, 2] += r * w0 * w2
            D[1, 0] += r * w1 * w0
            D[1, 1] += r * w1 * w1
            D[1, 2] += r * w1 * w2
            D[2, 0] += r * w2 * w0
            D[2, 1] += r * w2 * w1
            D[2, 2] += r * w2 * w2
        for a in range(6):
            for b in range(6):
                acc = 0.0
                for k in range(3):
                    for l in range(3):
                        acc += B[k, a] * D[k, l] * B[l, b]
                tan[t, a, b] = area[t] * acc
    return res, tan


def tri_geometry_numba(verts, tris):
    return _tri_geometry_loop(verts, tris)


def scalar_stiffness_local_numba(area, grads, coef):
    return _scalar_stiffness_loop(area, grads, coef)


def elastic_stiffness_local_numba(area, grads, lam, mu):
    return _elastic_stiffness_loop(area, grads, lam, mu)


def scalar_saturating_flux_numba(area, grads, u_loc, mu0, mu1, kappa):
    return _scalar_saturating_loop(area, grads, u_loc, mu0, mu1, kappa)


def elastic_saturating_stress_numba(area, grads, u_loc, mu0, mu1, kappa):
    return _elastic_saturating_loop(area, grads, u_loc, mu0, mu1, kappa)


if USE_NUMBA:
    tri_geometry = tri_geometry_numba
    scalar_stiffness_local = scalar_stiffness_local_numba
    elastic_stiffness_local = elastic_stiffness_local_numba
    scalar_saturating_flux = scalar_saturating_flux_numba
    elastic_saturating_stress = elastic_saturating_stress_numba
else:
    tri_geometry = tri_geometry_numpy
    scalar_stiffness_local = scalar_stiffness_local_numpy
    elastic_stiffness_local = elastic_stiffness_local_numpy
    scalar_saturating_flux = scalar_saturating_flux_numpy
    elastic_saturating_stress = elastic_saturating_stress_numpy


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
