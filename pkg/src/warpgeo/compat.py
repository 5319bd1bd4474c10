"""Pointwise residuals of the surface compatibility equations.

For an immersed surface the Gauss and Codazzi equations and the structure
equations tying (T, nu, S, f') together must hold identically; here each is
evaluated as a numerical residual on the coordinate frame X = d_u, Y = d_v.
The equations are tensorial, so frame evaluation is complete, and they are
invariant under a global flip of the normal, so all fields are computed with
the parametrization's own (smooth) frame normal.

The right-hand sides use

    A = (f')^2 - kappa e^{-2f},   B = f'' + kappa e^{-2f},

evaluated at the surface point's t-coordinate, together with the order-4
tensor built from T.  Induced Christoffels are exact per point (closed-form
first-form partials); only the S/T/nu fields and the Christoffel field
itself are differenced in parameter space, one centered difference deep.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace
from .fundforms import fundamental_data, induced_christoffels
from .immersion import Immersion, jet_at
from .report import ResidualSet

#: per-equation residual ids in report order
COMPAT_EQS = ("gauss", "codazzi", "eq35", "eq33", "eq34")


def default_field_step(imm: Immersion) -> float:
    """Parameter-space step for differencing induced fields.

    Exact jets admit a small step; FD jets carry O(eps/step^2) noise in the
    second-form entries, so the field step is kept well above the jet step.
    """
    if imm.jet_mode == "exact":
        return 1e-5
    return 10.0 * imm.jet_mode[1]


@dataclass
class CompatReport:
    """Per-equation maxima of the compatibility residuals over a grid."""

    residuals: ResidualSet = field(default_factory=ResidualSet)
    codazzi_flipped_max: float = 0.0
    grid_spec: str = ""
    jet_mode: str = "exact"
    field_step: float = 0.0

    def to_json(self) -> dict:
        return {
            "residuals": self.residuals.to_json(),
            "codazzi_flipped_max": self.codazzi_flipped_max,
            "grid": self.grid_spec,
            "jet_mode": self.jet_mode,
            "field_step": self.field_step,
        }


def _warp_terms(space: AmbientSpace, height: float):
    f = space.warp.value(height)
    fp = space.warp.d1(height)
    fpp = space.warp.d2(height)
    ke = space.kappa * np.exp(-2.0 * f)
    return fp, fp * fp - ke, fpp + ke        # f', A, B


def _norm_I(I, w):
    return float(np.sqrt(max(w @ I @ w, 0.0)))


def point_residuals(space: AmbientSpace, imm: Immersion, u: float, v: float,
                    field_step=None, swap_gauss_frame=False) -> dict:
    """All five compatibility residuals at one parameter point.

    Returns a dict with keys gauss/codazzi/eq35/eq33/eq34 plus
    codazzi_flipped (the Codazzi residual against the sign-flipped
    right-hand side, kept for diagnosis).  swap_gauss_frame evaluates the
    Gauss residual with (X,Y) and (Z,W) simultaneously swapped, which must
    not change it.
    """
    h = default_field_step(imm) if field_step is None else field_step

    fds = {}
    gams = {}
    for (i, j) in ((0, 0), (1, 0), (-1, 0), (2, 0), (-2, 0),
                   (0, 1), (0, -1), (0, 2), (0, -2)):
        jet = jet_at(imm, u + i * h, v + j * h)
        fds[(i, j)] = fundamental_data(space, jet, "frame")
        gams[(i, j)] = induced_christoffels(space, jet,
                                            fds[(i, j)].first_form)

    def d5(table, getter=lambda w: w):
        # fourth-order centered first derivatives of a stencil field
        def diff(p1, m1, p2, m2):
            return (8.0 * (getter(table[p1]) - getter(table[m1]))
                    - (getter(table[p2]) - getter(table[m2]))) / (12.0 * h)
        return (diff((1, 0), (-1, 0), (2, 0), (-2, 0)),
                diff((0, 1), (0, -1), (0, 2), (0, -2)))

    def d_field(getter):
        return d5(fds, getter)

    fd = fds[(0, 0)]
    I, II, S = fd.first_form, fd.second_form, fd.shape_op
    T, hgrad, nu = fd.tangent_height, fd.height_grad, fd.nu
    fp, A, B = _warp_terms(space, fd.height)
    gam = gams[(0, 0)]

    # --- Gauss -----------------------------------------------------------
    # intrinsic term g(R(X,Y)Z, W) for the curvature convention
    # R(X,Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z + nabla_{[X,Y]} Z
    dgam = d5(gams)

    X, Y, Z, W = 0, 1, 0, 1
    if swap_gauss_frame:
        X, Y, Z, W = 1, 0, 1, 0
    bracket = (dgam[Y][:, X, Z] - dgam[X][:, Y, Z]
               + gam[:, Y, :] @ gam[:, X, Z]
               - gam[:, X, :] @ gam[:, Y, Z])
    r_term = bracket @ I[:, W]

    def tcal(x, y, z, w):
        # g(X,Z) g(Y,T) g(W,T) - g(X,W) g(Y,T) g(Z,T) with g(-, T) = dh(-)
        return I[x, z] * hgrad[y] * hgrad[w] - I[x, w] * hgrad[y] * hgrad[z]

    lhs_gauss = (A * (I[X, W] * I[Y, Z] - I[X, Z] * I[Y, W])
                 - B * (tcal(X, Y, Z, W) - tcal(Y, X, Z, W)))
    rhs_gauss = r_term - II[X, Z] * II[Y, W] + II[X, W] * II[Y, Z]
    gauss = abs(lhs_gauss - rhs_gauss)

    # --- Codazzi ----------------------------------------------------------
    dS = d_field(lambda f: f.shape_op)
    nabla_u_Sv = dS[0][:, 1] + gam[:, 0, :] @ S[:, 1]
    nabla_v_Su = dS[1][:, 0] + gam[:, 1, :] @ S[:, 0]
    lhs_cod = nabla_u_Sv - nabla_v_Su
    rhs_cod = -nu * B * np.array([-hgrad[1], hgrad[0]])
    codazzi = _norm_I(I, lhs_cod - rhs_cod)
    codazzi_flipped = _norm_I(I, lhs_cod + rhs_cod)

    # --- structure equations ----------------------------------------------
    eq35 = abs(T @ I @ T + nu * nu - 1.0)

    dT = d_field(lambda f: f.tangent_height)
    eq33 = 0.0
    for x in range(2):
        ex = np.zeros(2)
        ex[x] = 1.0
        vec = dT[x] + gam[:, x, :] @ T - nu * S[:, x] \
            - fp * (ex - hgrad[x] * T)
        eq33 = max(eq33, _norm_I(I, vec))

    dnu = d_field(lambda f: f.nu)
    eq34 = 0.0
    for x in range(2):
        val = II[x, :] @ T + dnu[x] + fp * nu * hgrad[x]
        eq34 = max(eq34, abs(val))

    return {"gauss": gauss, "codazzi": codazzi, "eq35": eq35,
            "eq33": eq33, "eq34": eq34, "codazzi_flipped": codazzi_flipped}


def gauss_residual(space, imm, u, v, field_step=None,
                   swap_frame=False) -> float:
    return point_residuals(space, imm, u, v, field_step,
                           swap_gauss_frame=swap_frame)["gauss"]


def codazzi_residual(space, imm, u, v, field_step=None) -> float:
    return point_residuals(space, imm, u, v, field_step)["codazzi"]


def structure_residuals(space, imm, u, v, field_step=None):
    r = point_residuals(space, imm, u, v, field_step)
    return r["eq35"], r["eq33"], r["eq34"]


def grid_points(imm: Immersion, n_u: int, n_v: int, margin: float):
    """Uniform interior sample grid honoring an FD margin."""
    (u0, u1), (v0, v1) = imm.param_domain
    us = np.linspace(u0 + margin, u1 - margin, n_u)
    vs = np.linspace(v0 + margin, v1 - margin, n_v)
    return [(u, v) for u in us for v in vs]


def compat_report(space: AmbientSpace, imm: Immersion,
                  n_u: int = 3, n_v: int = 3,
                  field_step=None) -> CompatReport:
    """Maximum compatibility residuals of imm over an interior grid."""
    h = default_field_step(imm) if field_step is None else field_step
    jet_step = 0.0 if imm.jet_mode == "exact" else imm.jet_mode[1]
    margin = 2.2 * h + 2.5 * jet_step
    pts = grid_points(imm, n_u, n_v, margin)
    rep = CompatReport(
        grid_spec=f"{n_u}x{n_v} uniform, margin {margin:.3g}",
        jet_mode="exact" if imm.jet_mode == "exact"
        else f"fd({imm.jet_mode[1]:g})",
        field_step=h)
    for (u, v) in pts:
        r = point_residuals(space, imm, u, v, field_step=h)
        for eq in COMPAT_EQS:
            rep.residuals.add(eq, r[eq])
        rep.codazzi_flipped_max = max(rep.codazzi_flipped_max,
                                      r["codazzi_flipped"])
    return rep
