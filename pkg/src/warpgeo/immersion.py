"""Parametrized surfaces in R x_f M2(kappa) and their second-order jets.

An Immersion maps a parameter rectangle into ambient (t, x, y) coordinates.
Jets (position, first and second partials) come either from closed-form
derivatives or from second-order central differences of the map.

The catalog below covers the surfaces every verification suite runs on:
slices, round spheres and cylinders in the flat ambient, and rotational
surfaces built from a profile curve sigma -> (T(sigma), R(sigma)) revolved
about the t-axis.  Graphs t = u(r) are the profile (u(r), r).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BadInput, DegenerateJet, OutOfDomain

DEFAULT_FD_STEP = 1e-4


@dataclass
class ImmersionJet:
    """Second-order jet of a parametrized surface at one parameter point.

    point: ambient (t, x, y); d1[i]: first partials (rows u, v);
    d2[i, j]: second partials, symmetric in (i, j).
    """

    point: np.ndarray        # (3,)
    d1: np.ndarray           # (2, 3)
    d2: np.ndarray           # (2, 2, 3)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.point))
                and np.all(np.isfinite(self.d1))
                and np.all(np.isfinite(self.d2))):
            raise DegenerateJet("non-finite jet entries")


class Immersion:
    """Base class: subclasses provide map() and optionally exact_jet()."""

    #: ((u0, u1), (v0, v1)) closed parameter rectangle
    param_domain = ((-np.inf, np.inf), (-np.inf, np.inf))
    #: "exact" or ("fd", step)
    jet_mode = "exact"

    def map(self, u: float, v: float) -> np.ndarray:
        raise NotImplementedError

    def exact_jet(self, u: float, v: float) -> ImmersionJet:
        raise NotImplementedError

    def contains(self, u, v, margin=0.0):
        (u0, u1), (v0, v1) = self.param_domain
        return (u0 + margin <= u <= u1 - margin
                and v0 + margin <= v <= v1 - margin)


def fd_jet(imm: Immersion, u: float, v: float, step: float) -> ImmersionJet:
    """Second-order central-difference jet of the map."""
    h = step
    f = imm.map
    p = np.asarray(f(u, v), dtype=float)
    fpu, fmu = f(u + h, v), f(u - h, v)
    fpv, fmv = f(u, v + h), f(u, v - h)
    d1 = np.stack([(fpu - fmu) / (2 * h), (fpv - fmv) / (2 * h)])
    duu = (fpu - 2 * p + fmu) / (h * h)
    dvv = (fpv - 2 * p + fmv) / (h * h)
    duv = (f(u + h, v + h) - f(u + h, v - h)
           - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h)
    d2 = np.empty((2, 2, 3))
    d2[0, 0], d2[1, 1] = duu, dvv
    d2[0, 1] = d2[1, 0] = duv
    return ImmersionJet(p, d1, d2)


def jet_at(imm: Immersion, u: float, v: float,
           mode=None) -> ImmersionJet:
    """Jet of imm at (u, v), in the immersion's mode unless overridden.

    FD mode needs a margin of two steps to the domain boundary.  Raises
    OutOfDomain / DegenerateJet per the immersion contract.
    """
    mode = imm.jet_mode if mode is None else mode
    if mode == "exact":
        if not imm.contains(u, v):
            raise OutOfDomain(f"({u}, {v}) outside parameter domain")
        jet = imm.exact_jet(u, v)
    else:
        tag, step = mode
        if tag != "fd":
            raise BadInput(f"unknown jet mode {mode!r}")
        if not imm.contains(u, v, margin=2.0 * step):
            raise OutOfDomain(
                f"({u}, {v}) lacks the 2*step FD margin inside the domain")
        jet = fd_jet(imm, u, v, step)
    gram = jet.d1 @ jet.d1.T
    # scale-free: sin^2 of the angle between the partials
    if np.linalg.det(gram) <= 1e-12 * max(gram[0, 0] * gram[1, 1], 1e-300):
        raise DegenerateJet(
            f"first partials nearly dependent at ({u}, {v})")
    return jet


# ---------------------------------------------------------------------------
# catalog surfaces
# ---------------------------------------------------------------------------

class Slice(Immersion):
    """Level surface t = t0, parametrized by the model coordinates."""

    def __init__(self, t0: float, extent: float = 10.0):
        self.t0 = float(t0)
        self.param_domain = ((-extent, extent), (-extent, extent))

    def map(self, u, v):
        return np.array([self.t0, u, v])

    def exact_jet(self, u, v):
        d1 = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        return ImmersionJet(self.map(u, v), d1, np.zeros((2, 2, 3)))


class Profile:
    """Profile curve sigma -> (T, R) with closed-form derivatives."""

    def __init__(self, T, Tp, Tpp, R, Rp, Rpp):
        self.T, self.Tp, self.Tpp = T, Tp, Tpp
        self.R, self.Rp, self.Rpp = R, Rp, Rpp

    def at(self, s):
        return (self.T(s), self.Tp(s), self.Tpp(s),
                self.R(s), self.Rp(s), self.Rpp(s))


class RotationalSurface(Immersion):
    """Profile curve revolved about the t-axis.

    phi(sigma, theta) = (T(sigma), R(sigma) cos theta, R(sigma) sin theta).
    Oracles (mean/extrinsic curvature, angle function) may be attached by
    catalog constructors; None when no closed form is known.
    """

    oracle_mean_curv: Optional[Callable] = None
    oracle_ext_curv: Optional[Callable] = None
    oracle_angle: Optional[Callable] = None

    def __init__(self, profile: Profile, sigma_range, theta_range=None):
        self.profile = profile
        theta_range = theta_range or (-2.0 * np.pi, 2.0 * np.pi)
        self.param_domain = (tuple(sigma_range), tuple(theta_range))

    def map(self, s, th):
        T = self.profile.T(s)
        R = self.profile.R(s)
        return np.array([T, R * np.cos(th), R * np.sin(th)])

    def exact_jet(self, s, th):
        T, Tp, Tpp, R, Rp, Rpp = self.profile.at(s)
        c, sn = np.cos(th), np.sin(th)
        p = np.array([T, R * c, R * sn])
        d1 = np.array([[Tp, Rp * c, Rp * sn],
                       [0.0, -R * sn, R * c]])
        d2 = np.empty((2, 2, 3))
        d2[0, 0] = [Tpp, Rpp * c, Rpp * sn]
        d2[0, 1] = d2[1, 0] = [0.0, -Rp * sn, Rp * c]
        d2[1, 1] = [0.0, -R * c, -R * sn]
        return ImmersionJet(p, d1, d2)


def euclid_sphere(radius: float, t0: float = 0.0, warp_const: float = 0.0,
                  polar_margin: float = 0.2) -> RotationalSurface:
    """Round sphere of radius R (in the ambient metric) centered on the axis.

    Only meaningful for kappa = 0 with a constant warp; the model radius is
    rescaled by e^{-warp_const} so the ambient radius is exactly `radius`.
    Parametrized by the polar angle from the top pole, sigma in
    (polar_margin, pi - polar_margin); the polar caps are excluded because
    the chart degenerates there.  The attached oracles assume the inward
    normal.
    """
    R, ec = float(radius), np.exp(-float(warp_const))
    prof = Profile(
        T=lambda s: t0 + R * np.cos(s), Tp=lambda s: -R * np.sin(s),
        Tpp=lambda s: -R * np.cos(s),
        R=lambda s: ec * R * np.sin(s), Rp=lambda s: ec * R * np.cos(s),
        Rpp=lambda s: -ec * R * np.sin(s))
    surf = RotationalSurface(prof, (polar_margin, np.pi - polar_margin))
    surf.oracle_mean_curv = lambda s, th: 1.0 / R
    surf.oracle_ext_curv = lambda s, th: 1.0 / (R * R)
    surf.oracle_angle = lambda s, th: -np.cos(s)   # inward normal
    return surf


def cylinder(radius: float, height: float = 10.0) -> RotationalSurface:
    """Right cylinder of radius R about the t-axis (flat ambient, f = 0).

    Oracles assume the inward normal.
    """
    R = float(radius)
    prof = Profile(T=lambda s: s, Tp=lambda s: 1.0, Tpp=lambda s: 0.0,
                   R=lambda s: R, Rp=lambda s: 0.0, Rpp=lambda s: 0.0)
    surf = RotationalSurface(prof, (-height, height))
    surf.oracle_mean_curv = lambda s, th: 1.0 / (2.0 * R)
    surf.oracle_ext_curv = lambda s, th: 0.0
    surf.oracle_angle = lambda s, th: 0.0
    return surf


def rot_graph(u, up, upp, r_range) -> RotationalSurface:
    """Rotational graph t = u(r) from closed-form u, u', u''."""
    prof = Profile(T=u, Tp=up, Tpp=upp,
                   R=lambda r: r, Rp=lambda r: 1.0, Rpp=lambda r: 0.0)
    return RotationalSurface(prof, tuple(r_range))


def poly_graph(coeffs, r_range) -> RotationalSurface:
    """Rotational graph with a polynomial profile u(r) = sum c_k r^k."""
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    ddpoly = dpoly.deriv()
    return rot_graph(poly, dpoly, ddpoly, r_range)


def rot_graph_from_samples(r_grid, u_values) -> RotationalSurface:
    """Cubic-spline rotational graph through sampled (r, u) profile data.

    The spline has a continuous second derivative; the first and last grid
    cells are excluded from the usable parameter range so verification never
    touches the boundary-conditioned ends.
    """
    r = np.asarray(r_grid, dtype=float)
    u = np.asarray(u_values, dtype=float)
    if r.ndim != 1 or r.shape != u.shape:
        raise BadInput("r grid and u values must be 1-d arrays of equal length")
    if r.size < 4:
        raise BadInput("need at least 4 profile samples")
    if not np.all(np.diff(r) > 0):
        raise BadInput("r grid must be strictly increasing")
    spline = CubicSpline(r, u)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    surf = rot_graph(lambda s: float(spline(s)), lambda s: float(d1(s)),
                     lambda s: float(d2(s)), (r[1], r[-2]))
    return surf
