"""Fundamental forms, shape operator and complexified chart quantities.

Conventions.  The second fundamental form is taken against the chosen unit
normal N through the ambient connection,

    II_ij = gbar(d2_ij + GammaBar(d1_i, d1_j), N),

the shape operator is S = I^{-1} II, the mean curvature H = tr(S)/2 and the
extrinsic curvature K_e = det(S).  The vertical unit field is xi = d/dt; its
tangential part T (expressed in the parameter basis) solves I T = (h_u, h_v)
where h is the t-coordinate of the immersion, and the angle function is
nu = gbar(xi, N).

Complexification uses d/dz = (d_u - i d_v) / 2, so for a real chart quantity
W one has W_z = (W_u - i W_v) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ambient import AmbientSpace
from .errors import DegenerateJet, DivByZeroD, OrientationAmbiguous
from .immersion import ImmersionJet
from .report import ResidualSet

ORIENTATION_EPS = 1e-12


@dataclass
class FundamentalData:
    """Pointwise first/second form data of an immersed surface."""

    first_form: np.ndarray      # (2, 2) SPD
    second_form: np.ndarray     # (2, 2) symmetric
    shape_op: np.ndarray        # (2, 2), I^{-1} II
    mean_curv: float            # H
    ext_curv: float             # K_e
    normal: np.ndarray          # (3,) unit in the ambient metric
    nu: float                   # angle function gbar(xi, N)
    tangent_height: np.ndarray  # (2,) components of T in the parameter basis
    height_grad: np.ndarray     # (2,) (h_u, h_v)
    height: float               # t-coordinate of the point


@dataclass
class ComplexFundData:
    """Chart quantities in the complex frame dz = (du - i dv)/2 dual basis.

    E = <phi_z, phi_z>, F = <phi_z, phi_zbar>, D = |E|^2 - F^2,
    rho = II(d_z, d_zbar), p = II(d_z, d_z), alpha = conj(E) h_z - F h_zbar.
    nu_z is only available from field differentiation and is filled in by
    chart-grid evaluators, not by pointwise complexification.
    """

    E: complex
    F: float
    D: float
    rho: float
    p: complex
    alpha: complex
    hz: complex
    nu: float
    height: float
    nuz: Optional[complex] = None

    @property
    def lambda_conf(self) -> float:
        """Isothermal conformal factor 2F (meaningful when E = 0)."""
        return 2.0 * self.F


def _unit_normal(g, ginv, jet: ImmersionJet):
    """Ambient-unit normal from the metric cross product of the frame.

    The raw direction n^k = g^{kl} eps_{lmn} d1_u^m d1_v^n varies smoothly
    with the jet, so fixing its sign once orients a whole surface patch.
    """
    a, b = jet.d1
    cov = np.array([a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0]])
    n = ginv @ cov
    norm2 = n @ g @ n
    if norm2 <= 0 or not np.isfinite(norm2):
        raise DegenerateJet("normal direction degenerate")
    return n / np.sqrt(norm2)


def fundamental_data(space: AmbientSpace, jet: ImmersionJet,
                     orientation="up",
                     normal_seed=None) -> FundamentalData:
    """Fundamental forms of the immersed surface at one jet.

    orientation fixes the normal sign: "up"/"down" require nu >= 0 resp.
    nu <= 0 (raising OrientationAmbiguous where nu = 0 unless a seed vector
    is supplied); "frame"/"frame-flip" take the parametrization's own cross
    product normal (or its negative), which is smooth along any surface and
    therefore suitable for charts crossing nu = 0.
    """
    g, ginv, gam = space.geometry(jet.point)
    N = _unit_normal(g, ginv, jet)

    I = jet.d1 @ g @ jet.d1.T
    det_I = I[0, 0] * I[1, 1] - I[0, 1] * I[1, 0]
    # scale-free regularity: sin^2 of the frame angle, so that legitimately
    # small parameter scales (e.g. near a rotation axis) stay regular
    if det_I <= 1e-12 * max(I[0, 0] * I[1, 1], 1e-300):
        raise DegenerateJet("first fundamental form nearly singular")

    nu = N[0]  # gbar(xi, N) with xi = (1, 0, 0) and g_tt = 1
    if orientation in ("up", "down"):
        want = 1.0 if orientation == "up" else -1.0
        if abs(nu) < ORIENTATION_EPS:
            if normal_seed is None:
                raise OrientationAmbiguous(
                    "angle function vanishes; pass normal_seed to orient")
            sign = 1.0 if (np.asarray(normal_seed) @ g @ N) > 0 else -1.0
        else:
            sign = 1.0 if nu * want > 0 else -1.0
    elif orientation == "frame":
        sign = 1.0
    elif orientation == "frame-flip":
        sign = -1.0
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    N = sign * N
    nu = sign * nu

    gN = g @ N
    # II_ij = gbar(d2_ij + GammaBar(d1_i, d1_j), N)
    corr = np.einsum("kmn,im,jn->ijk", gam, jet.d1, jet.d1)
    II = (jet.d2 + corr) @ gN
    II = 0.5 * (II + II.T)

    I_inv = np.array([[I[1, 1], -I[0, 1]], [-I[1, 0], I[0, 0]]]) / det_I
    S = I_inv @ II
    hgrad = jet.d1[:, 0].copy()
    T = I_inv @ hgrad

    return FundamentalData(
        first_form=I, second_form=II, shape_op=S,
        mean_curv=0.5 * (S[0, 0] + S[1, 1]),
        ext_curv=float(S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]),
        normal=N, nu=float(nu), tangent_height=T, height_grad=hgrad,
        height=float(jet.point[0]))


def induced_metric_partials(space: AmbientSpace, jet: ImmersionJet):
    """Exact parameter derivatives dI[i, j, k] = d_i I_{jk} of the first form.

    I_{jk}(u, v) = g_{ab}(phi) phi_j^a phi_k^b differentiates into an ambient
    metric-partial term plus two second-jet terms, all closed-form, so the
    induced Christoffels need no finite differencing.
    """
    g = space.metric(jet.point)
    dg = space.metric_partials(jet.point)
    d1, d2 = jet.d1, jet.d2
    term_g = np.einsum("cab,ic,ja,kb->ijk", dg, d1, d1, d1)
    term_l = np.einsum("ab,ija,kb->ijk", g, d2, d1)
    dI = term_g + term_l + term_l.transpose(0, 2, 1)
    # symmetrize the form indices exactly; the einsums agree only to rounding
    return 0.5 * (dI + dI.transpose(0, 2, 1))


def induced_christoffels(space: AmbientSpace, jet: ImmersionJet,
                         first_form=None):
    """Christoffels gam[k, i, j] of the induced metric, exact per point."""
    dI = induced_metric_partials(space, jet)
    if first_form is None:
        g = space.metric(jet.point)
        first_form = jet.d1 @ g @ jet.d1.T
    bracket = dI + dI.transpose(1, 0, 2) - dI.transpose(1, 2, 0)
    return 0.5 * np.einsum("kl,ijl->kij", np.linalg.inv(first_form), bracket)


def complexify(fd: FundamentalData) -> ComplexFundData:
    """Chart quantities of fd in the complex frame of the same parameters."""
    Er, Fr, Gr = fd.first_form[0, 0], fd.first_form[0, 1], fd.first_form[1, 1]
    L, M, Nn = fd.second_form[0, 0], fd.second_form[0, 1], fd.second_form[1, 1]
    E = 0.25 * (Er - Gr) - 0.5j * Fr
    F = 0.25 * (Er + Gr)
    D = abs(E) ** 2 - F * F
    rho = 0.25 * (L + Nn)
    p = 0.25 * (L - Nn) - 0.5j * M
    hz = 0.5 * (fd.height_grad[0] - 1j * fd.height_grad[1])
    alpha = np.conj(E) * hz - F * np.conj(hz)
    return ComplexFundData(E=E, F=float(F), D=float(D), rho=float(rho), p=p,
                           alpha=alpha, hz=hz, nu=fd.nu, height=fd.height)


def height_identity_residuals(fd: FundamentalData,
                              cfd: Optional[ComplexFundData] = None,
                              out: Optional[ResidualSet] = None,
                              ) -> ResidualSet:
    """Pointwise algebraic identities tying T, alpha and h_z together.

    These hold in any chart (no differentiation involved); residual ids
    e4..e9.  e4 compares the complex components of T against alpha / D; e5
    re-derives alpha from the first form; e6/e7 express |T|^2 two ways; e8
    reconstructs h_z; e9 splits |h_z|^2.
    """
    cfd = complexify(fd) if cfd is None else cfd
    out = ResidualSet() if out is None else out
    if abs(cfd.D) < 1e-14:
        raise DivByZeroD("complex first-form determinant is numerically zero")

    E, F, D = cfd.E, cfd.F, cfd.D
    a, hz = cfd.alpha, cfd.hz
    hzb = np.conj(hz)
    T = fd.tangent_height
    t_complex = T[0] + 1j * T[1]          # component of T against d/dz
    norm_T2 = float(T @ fd.first_form @ T)

    out.add("e4", abs(t_complex - a / D))
    out.add("e5", abs(a - (np.conj(E) * hz - F * hzb)))
    out.add("e6", abs(norm_T2 - (a * hz + np.conj(a) * hzb) / D))
    out.add("e7", abs(norm_T2 - (E * hzb ** 2 + np.conj(E) * hz ** 2
                                 - 2.0 * F * hz * hzb) / D))
    out.add("e8", abs(hz - (E * a + F * np.conj(a)) / D))
    out.add("e9", abs(abs(hz) ** 2 - (norm_T2 * F + abs(a) ** 2 / D)))
    return out


def conformal_second_form_residuals(fd: FundamentalData,
                                    cfd: Optional[ComplexFundData] = None,
                                    ) -> dict:
    """Consistency of K_e and H with (rho, D, F) in a II-conformal chart.

    Returns absolute residuals of K_e * D + rho^2 = 0 ("e2") and
    H * rho - K_e * F = 0 ("e3"); both require II(d_z, d_z) = 0, i.e. a
    chart that is conformal for the second fundamental form.
    """
    cfd = complexify(fd) if cfd is None else cfd
    return {"e2": abs(fd.ext_curv * cfd.D + cfd.rho ** 2),
            "e3": abs(fd.mean_curv * cfd.rho - fd.ext_curv * cfd.F)}
