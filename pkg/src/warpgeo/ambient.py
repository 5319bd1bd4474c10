"""Warped products R x_f M2(kappa): warping functions, metric, connection.

Coordinates are ordered (t, x, y) throughout: t is the warped factor
coordinate, (x, y) are coordinates on the model space M2(kappa) carrying the
conformal factor lam(kappa) = 2 / (1 + kappa (x^2 + y^2)) (and 1 for
kappa = 0).  The ambient metric is

    g = dt^2 + e^{2 f(t)} lam^2 (dx^2 + dy^2).

Warping functions form a closed catalog with exact first and second
derivatives; every downstream residual check relies on the triple
(f, f', f'') being mutually consistent, so no numeric differentiation of f
is ever performed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadInput, DomainError

VALID_KAPPAS = (-1, 0, 1)


@dataclass(frozen=True)
class WarpFn:
    """Warping function f with closed-form derivatives.

    family is one of "Const", "Affine", "ExpScaled", "Quadratic" with
    parameters (c), (a, b) for a + b t, (a, b) for a e^{b t} and
    (a, b, c) for a + b t + c t^2 respectively.
    """

    family: str
    params: tuple

    @staticmethod
    def const(c):
        return WarpFn("Const", (float(c),))

    @staticmethod
    def affine(a, b):
        return WarpFn("Affine", (float(a), float(b)))

    @staticmethod
    def exp_scaled(a, b):
        return WarpFn("ExpScaled", (float(a), float(b)))

    @staticmethod
    def quadratic(a, b, c):
        return WarpFn("Quadratic", (float(a), float(b), float(c)))

    def value(self, t):
        if self.family == "Const":
            return self.params[0]
        if self.family == "Affine":
            a, b = self.params
            return a + b * t
        if self.family == "ExpScaled":
            a, b = self.params
            return a * np.exp(b * t)
        if self.family == "Quadratic":
            a, b, c = self.params
            return a + b * t + c * t * t
        raise BadInput(f"unknown warp family {self.family!r}")

    def d1(self, t):
        if self.family == "Const":
            return 0.0
        if self.family == "Affine":
            return self.params[1]
        if self.family == "ExpScaled":
            a, b = self.params
            return a * b * np.exp(b * t)
        if self.family == "Quadratic":
            _, b, c = self.params
            return b + 2.0 * c * t
        raise BadInput(f"unknown warp family {self.family!r}")

    def d2(self, t):
        if self.family in ("Const", "Affine"):
            return 0.0
        if self.family == "ExpScaled":
            a, b = self.params
            return a * b * b * np.exp(b * t)
        if self.family == "Quadratic":
            return 2.0 * self.params[2]
        raise BadInput(f"unknown warp family {self.family!r}")

    def to_json(self) -> dict:
        names = {"Const": ("c",), "Affine": ("a", "b"),
                 "ExpScaled": ("a", "b"), "Quadratic": ("a", "b", "c")}
        rec = {"family": self.family}
        rec.update(zip(names[self.family], self.params))
        return rec

    @staticmethod
    def from_json(rec: dict) -> "WarpFn":
        try:
            family = rec["family"]
        except (TypeError, KeyError):
            raise BadInput("warp record needs a 'family' tag")
        names = {"Const": ("c",), "Affine": ("a", "b"),
                 "ExpScaled": ("a", "b"), "Quadratic": ("a", "b", "c")}
        if family not in names:
            raise BadInput(f"unknown warp family {family!r}")
        try:
            params = tuple(float(rec[k]) for k in names[family])
        except KeyError as exc:
            raise BadInput(f"warp family {family} is missing parameter {exc}")
        return WarpFn(family, params)


def model_factor(kappa: int, x: float, y: float) -> float:
    """Conformal factor of the model-space metric at (x, y)."""
    if kappa == 0:
        return 1.0
    denom = 1.0 + kappa * (x * x + y * y)
    if denom <= 0.0:
        raise DomainError(
            f"point (x={x}, y={y}) outside the kappa={kappa} model domain")
    return 2.0 / denom


def _model_factor_grad(kappa, x, y):
    # d(lam)/dx = -kappa x lam^2 and likewise in y
    lam = model_factor(kappa, x, y)
    return lam, -kappa * x * lam * lam, -kappa * y * lam * lam


@dataclass(frozen=True)
class AmbientSpace:
    """The warped product R x_f M2(kappa)."""

    kappa: int
    warp: WarpFn

    def __post_init__(self):
        if self.kappa not in VALID_KAPPAS:
            raise BadInput(f"kappa must be one of {VALID_KAPPAS}")

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise BadInput("ambient point must be a finite (t, x, y) triple")
        model_factor(self.kappa, p[1], p[2])  # raises DomainError if outside
        return p

    def metric(self, p):
        """Metric tensor at p, a 3x3 diagonal matrix in (t, x, y) order."""
        p = self.check_point(p)
        lam = model_factor(self.kappa, p[1], p[2])
        s = np.exp(2.0 * self.warp.value(p[0])) * lam * lam
        return np.diag([1.0, s, s])

    def inverse_metric(self, p):
        p = self.check_point(p)
        lam = model_factor(self.kappa, p[1], p[2])
        s = np.exp(2.0 * self.warp.value(p[0])) * lam * lam
        return np.diag([1.0, 1.0 / s, 1.0 / s])

    def metric_partials(self, p):
        """Closed-form partials dg[i, j, k] = d_i g_{jk}."""
        p = self.check_point(p)
        t, x, y = p
        lam, lam_x, lam_y = _model_factor_grad(self.kappa, x, y)
        e2f = np.exp(2.0 * self.warp.value(t))
        fp = self.warp.d1(t)
        s = e2f * lam * lam
        dg = np.zeros((3, 3, 3))
        # t-derivative: only through e^{2f}
        dg[0, 1, 1] = dg[0, 2, 2] = 2.0 * fp * s
        # x- and y-derivatives: only through lam^2
        dg[1, 1, 1] = dg[1, 2, 2] = 2.0 * e2f * lam * lam_x
        dg[2, 1, 1] = dg[2, 2, 2] = 2.0 * e2f * lam * lam_y
        return dg

    def christoffels(self, p):
        """Levi-Civita symbols gam[k, i, j] = Gamma^k_{ij} at p."""
        return self.geometry(p)[2]

    def geometry(self, p):
        """(metric, inverse metric, Christoffels) at p in one evaluation."""
        p = self.check_point(p)
        t, x, y = p
        lam, lam_x, lam_y = _model_factor_grad(self.kappa, x, y)
        e2f = np.exp(2.0 * self.warp.value(t))
        fp = self.warp.d1(t)
        s = e2f * lam * lam
        g = np.diag([1.0, s, s])
        ginv_diag = np.array([1.0, 1.0 / s, 1.0 / s])

        dg = np.zeros((3, 3, 3))
        dg[0, 1, 1] = dg[0, 2, 2] = 2.0 * fp * s
        dg[1, 1, 1] = dg[1, 2, 2] = 2.0 * e2f * lam * lam_x
        dg[2, 1, 1] = dg[2, 2, 2] = 2.0 * e2f * lam * lam_y

        # Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij});
        # with dg[i, j, k] = d_i g_{jk} the bracket is
        # dg[i, j, l] + dg[j, i, l] - dg[l, i, j]; the metric is diagonal,
        # so contraction with g^{kl} reduces to a row scaling.
        bracket = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
        gam = 0.5 * bracket.transpose(2, 0, 1) * ginv_diag[:, None, None]
        return g, np.diag(ginv_diag), gam
