"""Conformal charts on rotational surfaces and chart-identity residuals.

A rotational surface admits a chart z = s + i theta in which either the
first fundamental form (isothermal, I = lambda |dz|^2) or, where K_e > 0,
the second fundamental form (II = 2 rho |dz|^2) is conformal.  Both arise
from a monotone reparametrization s(sigma) of the profile parameter with

    s'(sigma) = sqrt(I_ss / I_tt)      (isothermal-i)
    s'(sigma) = sqrt(L / N)            (conformal-ii, L = II_ss, N = II_tt)

computed by quadrature.  Everything downstream differentiates induced
fields (nu, K_e, rho, alpha, ...) in chart coordinates by centered
differences, optionally with one Richardson level, and compares against
the closed-form right-hand sides, with complex Christoffels of the induced
metric supplied exactly per point.

dz conventions follow d/dz = (d_s - i d_theta)/2; for a real chart field W,
W_z = (W_s - i W_t)/2, W_{z zbar} = (W_ss + W_tt)/4 and
W_zz = (W_ss - W_tt)/4 - i W_st / 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .ambient import AmbientSpace
from .errors import (BadInput, BadScale, NotConstantCurvature, NotMinimal,
                     NotPositivelyCurved, QuadratureFail)
from .fundforms import (ComplexFundData, FundamentalData, complexify,
                        fundamental_data, induced_christoffels)
from .immersion import Immersion, ImmersionJet, RotationalSurface, jet_at
from .report import ResidualSet

SECOND_FORM_EQS = ("e10", "e11", "e12", "e12.1", "e13", "e14", "e15")
ISOTHERMAL_EQS = ("he4", "he5", "he6", "he7", "he8")

ISOTHERMAL_I = "isothermal-i"
CONFORMAL_II = "conformal-ii"


def adaptive_simpson(f, a, b, rel_tol=1e-10, max_depth=48):
    """Adaptive Simpson quadrature of f over [a, b]."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = max(abs(whole), 1e-30)

    def recurse(a, b, fa, fm, fb, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole
        if abs(err) <= 15.0 * rel_tol * max(scale, abs(left + right)):
            return left + right + err / 15.0
        if depth >= max_depth:
            raise QuadratureFail(
                f"adaptive quadrature stalled on [{a}, {b}]")
        return (recurse(a, m, fa, flm, fm, left, depth + 1)
                + recurse(m, b, fm, frm, fb, right, depth + 1))

    return recurse(a, b, fa, fm, fb, whole, 0)


class _ChartSurface(Immersion):
    """The base rotational surface reparametrized by chart coordinates."""

    jet_mode = "exact"

    def __init__(self, chart: "ConformalChart"):
        self.chart = chart
        self.param_domain = (chart.s_range, chart.base.param_domain[1])

    def map(self, s, th):
        return self.chart.base.map(self.chart.sigma_of_s(s), th)

    def exact_jet(self, s, th):
        ch = self.chart
        sigma = ch.sigma_of_s(s)
        base = self.chart.base.exact_jet(sigma, th)
        sp = ch.sprime(sigma)
        spp = ch.sprime_d(sigma)
        d1 = np.empty((2, 3))
        d1[0] = base.d1[0] / sp
        d1[1] = base.d1[1]
        d2 = np.empty((2, 2, 3))
        d2[0, 0] = base.d2[0, 0] / sp ** 2 - base.d1[0] * spp / sp ** 3
        d2[0, 1] = d2[1, 0] = base.d2[0, 1] / sp
        d2[1, 1] = base.d2[1, 1]
        return ImmersionJet(base.point, d1, d2)


@dataclass
class ConformalChart:
    """Monotone reparametrization making I or II conformal.

    sigma_of_s refines an inverse-spline guess with Newton steps against the
    tabulated cumulative quadrature, keeping the s <-> sigma labeling
    consistent with the true integral to ~1e-12 so that chart-coordinate
    differencing of induced fields stays clean.
    """

    kind: str
    space: AmbientSpace
    base: RotationalSurface
    sigma_range: tuple
    frame_sign: float = 1.0
    quad_tol: float = 1e-12
    _tab_sigma: np.ndarray = field(default=None, repr=False)
    _tab_s: np.ndarray = field(default=None, repr=False)
    _inv: CubicSpline = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def s_range(self):
        return (self._tab_s[0], self._tab_s[-1])

    @property
    def surface(self) -> _ChartSurface:
        return _ChartSurface(self)

    @property
    def orientation(self):
        return "frame" if self.frame_sign > 0 else "frame-flip"

    # -- profile-side quantities -----------------------------------------
    def sprime(self, sigma: float) -> float:
        jet = self.base.exact_jet(sigma, 0.0)
        if self.kind == ISOTHERMAL_I:
            g = self.space.metric(jet.point)
            I = jet.d1 @ g @ jet.d1.T
            ratio = I[0, 0] / I[1, 1]
        else:
            fd = fundamental_data(self.space, jet, self.orientation)
            L, N = fd.second_form[0, 0], fd.second_form[1, 1]
            if L <= 0.0 or N <= 0.0:
                raise NotPositivelyCurved(
                    f"second form not positive at sigma={sigma}")
            ratio = L / N
        return float(np.sqrt(ratio))

    def sprime_d(self, sigma: float, h: float = 1e-5) -> float:
        return (self.sprime(sigma + h) - self.sprime(sigma - h)) / (2.0 * h)

    def s_of_sigma(self, sigma: float) -> float:
        i = int(np.searchsorted(self._tab_sigma, sigma)) - 1
        i = min(max(i, 0), len(self._tab_sigma) - 2)
        return self._tab_s[i] + adaptive_simpson(
            self.sprime, self._tab_sigma[i], sigma, self.quad_tol)

    def sigma_of_s(self, s: float) -> float:
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        sigma = float(self._inv(np.clip(s, *self.s_range)))
        lo, hi = self.sigma_range
        for _ in range(3):
            sigma = min(max(sigma, lo), hi)
            resid = self.s_of_sigma(sigma) - s
            if abs(resid) < 1e-14:
                break
            sigma -= resid / self.sprime(sigma)
        self._cache[s] = sigma
        return sigma


def build_chart(space: AmbientSpace, surf: RotationalSurface, kind: str,
                sigma_range=None, quad_tol: float = 1e-12,
                n_tab: int = 1200, curvature_floor: float = 1e-10,
                orientation: str = "frame") -> ConformalChart:
    """Construct a conformal chart on a rotational surface by quadrature.

    For conformal-ii the extrinsic curvature must be positive on the whole
    profile window and the normal sign is forced by rho > 0 (both diagonal
    second-form entries positive).  For isothermal-i the orientation
    argument picks the normal: "frame" keeps the parametrization's cross
    product; "up"/"down" flip it so the angle function has the requested
    sign near the lower profile end (the sign may still change further
    along, e.g. across a sphere's equator).
    """
    if kind not in (ISOTHERMAL_I, CONFORMAL_II):
        raise BadInput(f"unknown chart kind {kind!r}")
    sigma_range = sigma_range or surf.param_domain[0]
    lo, hi = float(sigma_range[0]), float(sigma_range[1])
    if not lo < hi:
        raise BadInput("empty sigma range")

    frame_sign = 1.0
    if kind == CONFORMAL_II:
        probes = np.linspace(lo, hi, 33)
        mid_fd = fundamental_data(
            space, surf.exact_jet(0.5 * (lo + hi), 0.0), "frame")
        frame_sign = 1.0 if mid_fd.second_form[0, 0] > 0 else -1.0
        for sg in probes:
            fd = fundamental_data(space, surf.exact_jet(sg, 0.0), "frame")
            if fd.ext_curv <= curvature_floor:
                raise NotPositivelyCurved(
                    f"K_e = {fd.ext_curv:.3g} at sigma = {sg:.6g}")
    elif orientation in ("up", "down"):
        want = 1.0 if orientation == "up" else -1.0
        for frac in (0.05, 0.2, 0.4):
            fd = fundamental_data(
                space, surf.exact_jet(lo + frac * (hi - lo), 0.0), "frame")
            if abs(fd.nu) > 1e-9:
                frame_sign = 1.0 if fd.nu * want > 0 else -1.0
                break
        else:
            raise BadInput("angle function vanishes along the probe points; "
                           "use orientation='frame'")
    elif orientation != "frame":
        raise BadInput(f"unknown orientation {orientation!r}")

    chart = ConformalChart(kind=kind, space=space, base=surf,
                           sigma_range=(lo, hi), frame_sign=frame_sign,
                           quad_tol=quad_tol)

    # geometric grading: the integrand typically steepens like 1/sigma
    # toward the axis, so grade the tabulation grid accordingly
    if lo > 0:
        grid = np.geomspace(lo, hi, n_tab)
    else:
        grid = np.linspace(lo, hi, n_tab)
    svals = np.empty_like(grid)
    svals[0] = 0.0
    for i in range(1, len(grid)):
        svals[i] = svals[i - 1] + adaptive_simpson(
            chart.sprime, grid[i - 1], grid[i], quad_tol)
    chart._tab_sigma = grid
    chart._tab_s = svals
    chart._inv = CubicSpline(svals, grid)
    return chart


# ---------------------------------------------------------------------------
# chart-coordinate differencing of induced fields
# ---------------------------------------------------------------------------

class ChartStencil:
    """Fundamental/complex data on an FD stencil around one chart point.

    Provides fourth-order (one Richardson level) or plain second-order
    centered derivatives in the complex coordinate z = s + i theta.
    """

    def __init__(self, space: AmbientSpace, chart: ConformalChart,
                 s: float, th: float, h: float, richardson: bool = True):
        self.h = h
        self.richardson = richardson
        surf = chart.surface
        reach = 2 if richardson else 1
        offsets = {(0, 0)}
        for k in range(1, reach + 1):
            offsets |= {(k, 0), (-k, 0), (0, k), (0, -k), (k, k), (k, -k),
                        (-k, k), (-k, -k)}
        self.data = {}
        for (i, j) in offsets:
            jet = jet_at(surf, s + i * h, th + j * h)
            fd = fundamental_data(space, jet, chart.orientation)
            self.data[(i, j)] = (fd, complexify(fd))
        self.center_jet = jet_at(surf, s, th)

    def fd(self, off=(0, 0)) -> FundamentalData:
        return self.data[off][0]

    def cfd(self, off=(0, 0)) -> ComplexFundData:
        return self.data[off][1]

    def _w(self, getter):
        return {off: getter(fdc[0], fdc[1])
                for off, fdc in self.data.items()}

    def _d1(self, w, axis):
        h = self.h
        step = (1, 0) if axis == 0 else (0, 1)

        def at(k):
            return w[(k * step[0], k * step[1])]

        if not self.richardson:
            return (at(1) - at(-1)) / (2 * h)
        return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h)

    def _d2(self, w, axis):
        h = self.h
        step = (1, 0) if axis == 0 else (0, 1)

        def at(k):
            return w[(k * step[0], k * step[1])]

        if not self.richardson:
            return (at(1) - 2.0 * at(0) + at(-1)) / (h * h)
        return (-at(2) + 16.0 * at(1) - 30.0 * at(0)
                + 16.0 * at(-1) - at(-2)) / (12.0 * h * h)

    def _dmixed(self, w):
        h = self.h

        def cross(k):
            return (w[(k, k)] - w[(k, -k)] - w[(-k, k)] + w[(-k, -k)]) \
                / (4.0 * k * k * h * h)

        if not self.richardson:
            return cross(1)
        return (4.0 * cross(1) - cross(2)) / 3.0

    def derivs(self, getter):
        """(W_z, W_zbar, W_zz, W_zzbar) of the field W = getter(fd, cfd)."""
        w = self._w(getter)
        ws, wt = self._d1(w, 0), self._d1(w, 1)
        wss, wtt = self._d2(w, 0), self._d2(w, 1)
        wst = self._dmixed(w)
        wz = 0.5 * (ws - 1j * wt)
        wzb = 0.5 * (ws + 1j * wt)
        wzz = 0.25 * (wss - wtt) - 0.5j * wst
        wzzb = 0.25 * (wss + wtt)
        return wz, wzb, wzz, wzzb


def complex_christoffels(space: AmbientSpace, chart: ConformalChart,
                         s: float, th: float) -> dict:
    """Induced-metric Christoffels in the complex chart frame at z.

    Returns {"111", "211", "112", "212", "122", "222"} for
    nabla_{d_a} d_b = Gamma^1_{ab} d_z + Gamma^2_{ab} d_zbar with index 1
    for z and 2 for zbar; exact per point (no differencing).
    """
    jet = jet_at(chart.surface, s, th)
    gam = induced_christoffels(space, jet)
    az = np.array([0.5, -0.5j])
    azb = np.array([0.5, +0.5j])

    def nabla(a, b):
        return np.einsum("kij,i,j->k", gam.astype(complex), a, b)

    def split(v):
        # components against (d_z, d_zbar): v^z = v^s + i v^t
        return v[0] + 1j * v[1], v[0] - 1j * v[1]

    g111, g211 = split(nabla(az, az))
    g112, g212 = split(nabla(az, azb))
    g122, g222 = split(nabla(azb, azb))
    return {"111": g111, "211": g211, "112": g112,
            "212": g212, "122": g122, "222": g222}


def _warp_at(space: AmbientSpace, height: float):
    f = space.warp.value(height)
    fp = space.warp.d1(height)
    fpp = space.warp.d2(height)
    return f, fp, fpp, fpp + space.kappa * np.exp(-2.0 * f)


def chart_grid(chart: ConformalChart, n_s: int, n_th: int = 3,
               h: float = 1e-3, richardson: bool = True,
               theta_span=(0.0, 0.5)):
    """Interior (s, theta) sample points honoring the stencil margin."""
    s0, s1 = chart.s_range
    margin = (2 if richardson else 1) * h * 1.05
    ss = np.linspace(s0 + margin, s1 - margin, n_s)
    ts = np.linspace(theta_span[0], theta_span[1], n_th)
    return [(float(s), float(t)) for s in ss for t in ts]


def second_form_chart_residuals(space: AmbientSpace, chart: ConformalChart,
                                pts, h: float = 1e-3,
                                richardson: bool = True,
                                include_variants: bool = False,
                                out: Optional[ResidualSet] = None,
                                ) -> ResidualSet:
    """Residuals e10..e15 of the structure identities in a II-conformal chart.

    e13 is evaluated with the sign that the identity actually satisfies,
    +f'(F - h_z h_zbar); the opposite-sign variant is reported as e13_alt
    when include_variants is set (both coincide wherever f' = 0).
    """
    if chart.kind != CONFORMAL_II:
        raise BadInput("second-form residuals need a conformal-ii chart")
    out = ResidualSet() if out is None else out
    for (s, th) in pts:
        st = ChartStencil(space, chart, s, th, h, richardson)
        fd, cfd = st.fd(), st.cfd()
        rho, D, F, E = cfd.rho, cfd.D, cfd.F, cfd.E
        a, hz = cfd.alpha, cfd.hz
        hzb = np.conj(hz)
        ab = np.conj(a)
        nu, ke = fd.nu, fd.ext_curv
        _, fp, fpp, B = _warp_at(space, fd.height)

        nu_z, _, _, nu_zzb = st.derivs(lambda f_, c_: f_.nu)
        _, rho_zb, _, _ = st.derivs(lambda f_, c_: c_.rho)
        ke_z, ke_zb, _, _ = st.derivs(lambda f_, c_: f_.ext_curv)
        D_z, _, _, _ = st.derivs(lambda f_, c_: c_.D)
        a_z, _, _, _ = st.derivs(lambda f_, c_: c_.alpha)
        _, _, h_zz, h_zzb = st.derivs(lambda f_, c_: f_.height)

        gams = complex_christoffels(space, chart, s, th)

        out.add("e10", abs(rho_zb / rho + gams["112"] - gams["222"]
                           - (nu / rho) * a * B))
        out.add("e11", abs(nu_z - ab * ke / rho + fp * nu * hz))
        out.add("e12", abs(gams["112"] + ke_zb / (4.0 * ke)
                           - nu * a * B / (2.0 * rho)))
        out.add("e12.1", abs(h_zz - gams["111"] * hz - gams["211"] * hzb
                             - fp * E + fp * hz * hz))
        e13_core = (rho * nu * (1.0 - B * (1.0 - nu * nu) / (2.0 * ke))
                    - (ke_zb * hz + ke_z * hzb) / (4.0 * ke))
        out.add("e13", abs(h_zzb - e13_core - fp * (F - hz * hzb)))
        if include_variants:
            out.add("e13_alt", abs(h_zzb - e13_core + fp * (F - hz * hzb)))
        out.add("e14", abs(a_z - a * D_z / (2.0 * D)
                           - (ab * ke_zb - a * ke_z) / (4.0 * ke)
                           + rho * F * nu + fp * (a * hz - D)))
        out.add("e15", abs(nu_zzb - (ab * ke_zb + a * ke_z) / (4.0 * rho)
                           + ke * F * nu + ke * fp / rho * (a * hz - D)
                           + fp * (nu_z * hzb + nu * h_zzb)
                           + fpp * nu * abs(hz) ** 2))
        # trace identity of the complex Christoffels
        _, D_zb, _, _ = st.derivs(lambda f_, c_: c_.D)
        out.add("e12.2", abs(gams["112"] + gams["222"] - D_zb / (2.0 * D)))
    return out


def isothermal_chart_residuals(space: AmbientSpace, chart: ConformalChart,
                               pts, h: float = 1e-3,
                               richardson: bool = True,
                               out: Optional[ResidualSet] = None,
                               ) -> ResidualSet:
    """Residuals he4..he8 of the structure identities in an isothermal chart.

    The mean curvature need not be constant; its chart derivatives enter
    he4 and he8 explicitly.  he5 is the pointwise algebraic identity
    |grad h|^2 = 4 |h_z|^2 / lambda.
    """
    if chart.kind != ISOTHERMAL_I:
        raise BadInput("isothermal residuals need an isothermal-i chart")
    out = ResidualSet() if out is None else out
    for (s, th) in pts:
        st = ChartStencil(space, chart, s, th, h, richardson)
        fd, cfd = st.fd(), st.cfd()
        lam = cfd.lambda_conf
        p, hz = cfd.p, cfd.hz
        hzb = np.conj(hz)
        nu, H = fd.nu, fd.mean_curv
        _, fp, fpp, B = _warp_at(space, fd.height)

        nu_z, _, _, nu_zzb = st.derivs(lambda f_, c_: f_.nu)
        H_z, H_zb, _, _ = st.derivs(lambda f_, c_: f_.mean_curv)
        p_arr = st.derivs(lambda f_, c_: c_.p)
        p_zb = p_arr[1]
        _, _, _, h_zzb = st.derivs(lambda f_, c_: f_.height)

        T = fd.tangent_height
        grad2 = float(T @ fd.first_form @ T)

        out.add("he4", abs(p_zb - 0.5 * lam * H_z - 0.5 * lam * B * nu * hz))
        out.add("he5", abs(grad2 - 4.0 * abs(hz) ** 2 / lam))
        out.add("he6", abs(nu_z + H * hz + 2.0 * p * hzb / lam
                           + fp * nu * hz))
        out.add("he7", abs(h_zzb - 0.5 * nu * lam * H
                           - fp * (0.5 * lam - abs(hz) ** 2)))
        nu_zb = np.conj(nu_z)
        out.add("he8", abs(
            nu_zzb + (H_zb * hz + H_z * hzb)
            + 0.25 * lam * nu * (B * (1.0 - nu * nu)
                                 + 8.0 * abs(p) ** 2 / lam ** 2
                                 + 2.0 * H * H)
            - fp * (2.0 * p * hzb ** 2 / lam
                    - H * (0.5 * lam - abs(hz) ** 2)
                    - (nu_zb * hz + nu * h_zzb))
            + fpp * nu * abs(hz) ** 2))
    return out


# ---------------------------------------------------------------------------
# auxiliary-function Laplacians (t-flux functions e^f nu / curvature scale)
# ---------------------------------------------------------------------------

def check_constant(values, threshold=1e-6, what="curvature"):
    values = np.asarray(values, dtype=float)
    ref = np.mean(values)
    spread = np.ptp(values) / max(abs(ref), 1e-30)
    if spread > threshold:
        raise NotConstantCurvature(
            f"{what} varies by {spread:.3g} (relative) over the grid")
    return float(ref)


def aux_laplacian_ke(space: AmbientSpace, chart: ConformalChart,
                     s: float, th: float, ke0: float,
                     h: float = 1e-3, richardson: bool = True):
    """(lhs, rhs) of the mixed z-derivative of g(nu) = e^f nu / sqrt(K_e).

    lhs is the FD value of g_{z zbar}; rhs the closed-form
    (e^f / sqrt(K_e)) (-K_e F nu + K_e f' D / rho) with the constant K_e.
    Stated for the flat model fiber (kappa = 0).
    """
    if space.kappa != 0:
        raise BadInput("flux-function identities hold for kappa = 0")
    st = ChartStencil(space, chart, s, th, h, richardson)
    fd, cfd = st.fd(), st.cfd()
    f, fp, _, _ = _warp_at(space, fd.height)
    rke = np.sqrt(ke0)

    def gfun(f_, c_):
        return np.exp(space.warp.value(f_.height)) * f_.nu / rke

    _, _, _, g_zzb = st.derivs(gfun)
    rhs = np.exp(f) / rke * (-ke0 * cfd.F * fd.nu
                             + ke0 * fp * cfd.D / cfd.rho)
    return float(np.real(g_zzb)), float(rhs)


def aux_laplacian_h(space: AmbientSpace, chart: ConformalChart,
                    s: float, th: float, h0: float,
                    h: float = 1e-3, richardson: bool = True):
    """(lhs, rhs) for g(nu) = e^f nu / H with constant mean curvature H.

    rhs = (e^f/H) (-(lambda nu / 4)(f''(1 - nu^2) + 8|p|^2/lambda^2 + 2H^2)
                   - f' H lambda / 2), for the flat model fiber.
    """
    if space.kappa != 0:
        raise BadInput("flux-function identities hold for kappa = 0")
    st = ChartStencil(space, chart, s, th, h, richardson)
    fd, cfd = st.fd(), st.cfd()
    f, fp, fpp, _ = _warp_at(space, fd.height)
    lam = cfd.lambda_conf

    def gfun(f_, c_):
        return np.exp(space.warp.value(f_.height)) * f_.nu / h0

    _, _, _, g_zzb = st.derivs(gfun)
    rhs = np.exp(f) / h0 * (
        -0.25 * lam * fd.nu * (fpp * (1.0 - fd.nu ** 2)
                               + 8.0 * abs(cfd.p) ** 2 / lam ** 2
                               + 2.0 * h0 * h0)
        - 0.5 * fp * h0 * lam)
    return float(np.real(g_zzb)), float(rhs)


def minimal_graph_identity(space: AmbientSpace, chart: ConformalChart,
                           s: float, th: float,
                           h: float = 1e-3, richardson: bool = True,
                           h_tol: float = 1e-8):
    """(lhs, rhs) of h_{z zbar} = f' (lambda/4)(1 + nu^2) on minimal surfaces."""
    st = ChartStencil(space, chart, s, th, h, richardson)
    fd, cfd = st.fd(), st.cfd()
    if abs(fd.mean_curv) > h_tol:
        raise NotMinimal(f"|H| = {abs(fd.mean_curv):.3g} exceeds {h_tol:g}")
    _, fp, _, _ = _warp_at(space, fd.height)
    _, _, _, h_zzb = st.derivs(lambda f_, c_: f_.height)
    rhs = fp * cfd.lambda_conf * (1.0 + fd.nu ** 2) / 4.0
    return float(np.real(h_zzb)), float(rhs)


def conformal_laplacian(space: AmbientSpace, chart: ConformalChart,
                        s: float, th: float, getter,
                        h: float = 1e-3, richardson: bool = True) -> float:
    """Laplace-Beltrami of a chart field for the chart's conformal metric.

    For isothermal-i the metric is lambda |dz|^2 and Delta = (4/lambda)
    d2/dz dzbar; for conformal-ii it is 2 rho |dz|^2 and Delta = (2/rho)
    d2/dz dzbar.
    """
    st = ChartStencil(space, chart, s, th, h, richardson)
    _, _, _, w_zzb = st.derivs(getter)
    cfd = st.cfd()
    if chart.kind == ISOTHERMAL_I:
        factor = 4.0 / cfd.lambda_conf
    else:
        factor = 2.0 / cfd.rho
    return float(np.real(w_zzb)) * factor


# ---------------------------------------------------------------------------
# Laplace-Beltrami scaling on explicit 2x2 metric fields
# ---------------------------------------------------------------------------

def laplace_beltrami_fd(metric_field, u_field, s: float, t: float,
                        h: float = 1e-3) -> float:
    """FD Laplace-Beltrami (1/sqrt det g) d_i (sqrt det g g^{ij} d_j u)."""

    def flux(ss, tt):
        g = np.asarray(metric_field(ss, tt), dtype=float)
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if det <= 0:
            raise BadInput("metric field not positive definite")
        du = np.array([
            (u_field(ss + h, tt) - u_field(ss - h, tt)) / (2 * h),
            (u_field(ss, tt + h) - u_field(ss, tt - h)) / (2 * h)])
        return np.sqrt(det) * np.linalg.solve(g, du)

    div = ((flux(s + h, t)[0] - flux(s - h, t)[0]) / (2 * h)
           + (flux(s, t + h)[1] - flux(s, t - h)[1]) / (2 * h))
    g0 = np.asarray(metric_field(s, t), dtype=float)
    det0 = g0[0, 0] * g0[1, 1] - g0[0, 1] * g0[1, 0]
    return float(div / np.sqrt(det0))


def laplacian_scaling(metric_field, u_field, c: float, s: float, t: float,
                      h: float = 1e-3):
    """(Delta_{c g} u, (1/c) Delta_g u) at one point; BadScale for c <= 0."""
    if not c > 0:
        raise BadScale(f"scale must be positive, got {c}")

    def scaled(ss, tt):
        return c * np.asarray(metric_field(ss, tt), dtype=float)

    lhs = laplace_beltrami_fd(scaled, u_field, s, t, h)
    rhs = laplace_beltrami_fd(metric_field, u_field, s, t, h) / c
    return lhs, rhs
