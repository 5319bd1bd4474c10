import numpy as np
import pytest

from warpgeo.ambient import AmbientSpace, WarpFn
from warpgeo.conformal import (CONFORMAL_II, ISOTHERMAL_I, adaptive_simpson,
                               aux_laplacian_h, aux_laplacian_ke, build_chart,
                               chart_grid, check_constant, complex_christoffels,
                               conformal_laplacian, isothermal_chart_residuals,
                               laplace_beltrami_fd, laplacian_scaling,
                               minimal_graph_identity,
                               second_form_chart_residuals)
from warpgeo.errors import (BadScale, NotConstantCurvature,
                            NotPositivelyCurved, QuadratureFail)
from warpgeo.fundforms import complexify, fundamental_data
from warpgeo.graphsolve import shoot_profile
from warpgeo.immersion import cylinder, jet_at, rot_graph

SPHERE_TOL = 1e-5
CAP_TOL = 1e-3


def test_adaptive_simpson():
    assert adaptive_simpson(np.exp, 0.0, 1.0) == \
        pytest.approx(np.e - 1.0, rel=1e-11)
    assert adaptive_simpson(lambda x: 1.0 / x, 0.5, 2.0) == \
        pytest.approx(np.log(4.0), rel=1e-11)
    with pytest.raises(QuadratureFail):
        adaptive_simpson(lambda x: np.sin(50.0 * x), 0.0, 3.0,
                         rel_tol=1e-14, max_depth=3)


def flat_disk():
    return rot_graph(lambda r: 0.0, lambda r: 0.0, lambda r: 0.0, (0.2, 2.0))


def test_disk_chart_is_log_polar(flat_space):
    ch = build_chart(flat_space, flat_disk(), ISOTHERMAL_I)
    s1 = ch.s_of_sigma(1.0)
    for sg in (0.3, 0.8, 1.7):
        assert ch.s_of_sigma(sg) - s1 == pytest.approx(np.log(sg), abs=1e-10)
    # conformal factor F = sigma^2 / 2 in the chart
    jet = jet_at(ch.surface, ch.s_of_sigma(0.7), 0.3)
    cfd = complexify(fundamental_data(flat_space, jet, "frame"))
    assert abs(cfd.E) <= 1e-12 * cfd.F
    assert cfd.F == pytest.approx(0.7**2 / 2.0, rel=1e-10)


def test_sphere_isothermal_chart_is_mercator(flat_space, sphere_chart_iso):
    mid = sphere_chart_iso.s_of_sigma(np.pi / 2.0)
    for sg in (0.5, 1.2, 2.4):
        assert sphere_chart_iso.s_of_sigma(sg) - mid == \
            pytest.approx(np.log(np.tan(sg / 2.0)), abs=1e-9)
    jet = jet_at(sphere_chart_iso.surface, 0.4, 0.2)
    cfd = complexify(fundamental_data(flat_space, jet, "frame"))
    assert abs(cfd.E) <= 1e-9 * cfd.F


def test_sphere_charts_coincide_for_both_forms(flat_space, sphere_chart_ii,
                                               sphere_chart_iso):
    # umbilic surface: II is proportional to I, so both charts agree up to
    # the additive constant of the quadrature
    off = sphere_chart_ii.s_of_sigma(1.0) - sphere_chart_iso.s_of_sigma(1.0)
    for sg in (0.5, 1.5, 2.5):
        assert sphere_chart_ii.s_of_sigma(sg) - off == \
            pytest.approx(sphere_chart_iso.s_of_sigma(sg), abs=1e-9)


def test_chart_invariants(flat_space, sphere_chart_ii, exp_space,
                          ke_cap_chart):
    for space, ch in ((flat_space, sphere_chart_ii),
                      (exp_space, ke_cap_chart)):
        for (s, th) in chart_grid(ch, 4, 2):
            fd = fundamental_data(space, jet_at(ch.surface, s, th),
                                  ch.orientation)
            cfd = complexify(fd)
            assert cfd.rho > 0
            # II(d_z, d_z) = 0 within 1e-8 rho
            assert abs(cfd.p) <= 1e-8 * cfd.rho


def test_conformal_ii_requires_positive_curvature(flat_space):
    with pytest.raises(NotPositivelyCurved):
        build_chart(flat_space, cylinder(1.0), CONFORMAL_II)


def test_complex_christoffels_flat_chart(flat_space):
    ch = build_chart(flat_space, flat_disk(), ISOTHERMAL_I)
    # log-polar chart of the flat disk: I = sigma^2 |dz|^2 with
    # sigma = e^s, so Gamma^1_11 = lambda_z / lambda = 1 and the mixed
    # symbols vanish
    g = complex_christoffels(flat_space, ch, ch.s_of_sigma(0.9), 0.4)
    assert abs(g["112"]) <= 1e-10 and abs(g["212"]) <= 1e-10
    assert g["111"] == pytest.approx(1.0, abs=1e-10)


def test_complex_christoffels_symmetries(flat_space, sphere_chart_ii):
    g = complex_christoffels(flat_space, sphere_chart_ii, 0.3, 0.5)
    assert abs(g["212"] - np.conj(g["112"])) <= 1e-12
    assert abs(g["111"] - np.conj(g["222"])) <= 1e-12
    assert abs(g["211"] - np.conj(g["122"])) <= 1e-12


def test_second_form_identities_on_sphere(flat_space, sphere_chart_ii):
    pts = chart_grid(sphere_chart_ii, 5, 2)
    out = second_form_chart_residuals(flat_space, sphere_chart_ii, pts)
    for eq in ("e10", "e11", "e12", "e12.1", "e13", "e14", "e15", "e12.2"):
        assert out[eq].max <= SPHERE_TOL, eq


def test_second_form_identities_on_cap(exp_space, ke_cap_chart):
    pts = chart_grid(ke_cap_chart, 5, 2)
    out = second_form_chart_residuals(exp_space, ke_cap_chart, pts,
                                      include_variants=True)
    for eq in ("e10", "e11", "e12", "e12.1", "e13", "e14", "e15"):
        assert out[eq].max <= CAP_TOL, eq
    # the opposite sign of the f'-term in the mixed-derivative identity is
    # clearly wrong where f' != 0
    assert out["e13_alt"].max >= 1e-2


def test_nu_sensitivity_on_cap(exp_space, ke_cap_chart):
    # shifting the angle function must break the first-derivative identity
    pts = chart_grid(ke_cap_chart, 5, 1)
    worst = 0.0
    for (s, th) in pts:
        fd = fundamental_data(exp_space, jet_at(ke_cap_chart.surface, s, th),
                              ke_cap_chart.orientation)
        cfd = complexify(fd)
        fp = exp_space.warp.d1(fd.height)
        worst = max(worst, abs(fp * 1e-3 * cfd.hz))
    assert worst >= 1e-4


def test_isothermal_identities_on_sphere(flat_space, sphere_chart_iso):
    pts = chart_grid(sphere_chart_iso, 5, 2)
    out = isothermal_chart_residuals(flat_space, sphere_chart_iso, pts)
    for eq in ("he4", "he5", "he6", "he7", "he8"):
        assert out[eq].max <= SPHERE_TOL, eq
    assert out["he4"].max <= 1e-8   # p = 0 and H constant on the sphere
    assert out["he5"].max <= 1e-8   # pointwise algebraic identity


def test_isothermal_identities_on_cap(exp_space, cmc_cap_chart):
    pts = chart_grid(cmc_cap_chart, 5, 2)
    out = isothermal_chart_residuals(exp_space, cmc_cap_chart, pts)
    for eq in ("he4", "he5", "he6", "he7", "he8"):
        assert out[eq].max <= CAP_TOL, eq
    assert out["he5"].max <= 1e-8


def test_isothermal_identities_on_flat_slice(flat_space):
    # u = 0 disk: h constant, nu = 1, H = 0, f' = 0 make the mixed
    # derivative identity trivial
    ch = build_chart(flat_space, flat_disk(), ISOTHERMAL_I)
    pts = chart_grid(ch, 4, 2)
    out = isothermal_chart_residuals(flat_space, ch, pts)
    assert out["he7"].max <= 1e-12


def test_residuals_are_theta_independent(exp_space, ke_cap_chart):
    # evaluate above the rounding floor so the comparison is meaningful;
    # the truncation error itself is rotationally symmetric
    s0 = np.mean(ke_cap_chart.s_range)
    a = second_form_chart_residuals(exp_space, ke_cap_chart, [(s0, 0.1)],
                                    h=5e-3, richardson=False)
    b = second_form_chart_residuals(exp_space, ke_cap_chart, [(s0, 1.7)],
                                    h=5e-3, richardson=False)
    for eq in ("e10", "e11", "e13", "e15"):
        assert abs(a[eq].max - b[eq].max) <= 1e-10


def test_fd_convergence_order_on_sphere(flat_space, sphere_chart_ii):
    pts = chart_grid(sphere_chart_ii, 4, 1, h=8e-3)
    coarse = second_form_chart_residuals(flat_space, sphere_chart_ii, pts,
                                         h=8e-3, richardson=False)
    fine = second_form_chart_residuals(flat_space, sphere_chart_ii, pts,
                                       h=4e-3, richardson=False)
    seen = 0
    for eq in ("e10", "e11", "e12", "e12.1", "e13", "e14", "e15"):
        if coarse[eq].max < 1e-8:
            continue        # already at the rounding/constancy floor
        seen += 1
        assert np.log2(coarse[eq].max / fine[eq].max) >= 1.8, eq
    assert seen >= 3


def test_flux_function_laplacian_ke_sphere(flat_space, sphere_chart_ii):
    # unit sphere, flat warp: the closed form reduces to -F nu
    for (s, th) in chart_grid(sphere_chart_ii, 3, 1):
        lhs, rhs = aux_laplacian_ke(flat_space, sphere_chart_ii, s, th, 1.0)
        fd = fundamental_data(flat_space,
                              jet_at(sphere_chart_ii.surface, s, th),
                              sphere_chart_ii.orientation)
        cfd = complexify(fd)
        assert lhs == pytest.approx(-cfd.F * fd.nu, abs=1e-5)
        assert abs(lhs - rhs) <= 1e-5


def test_flux_function_laplacian_ke_cap(exp_space, ke_cap_chart):
    for (s, th) in chart_grid(ke_cap_chart, 4, 1):
        lhs, rhs = aux_laplacian_ke(exp_space, ke_cap_chart, s, th, 1.0)
        assert abs(lhs - rhs) <= CAP_TOL


def test_flux_function_laplacian_h_sphere(flat_space, unit_sphere):
    # upper spherical zone with the inward normal: H = 1, p = 0, so the
    # closed form is -lambda nu / 2
    ch = build_chart(flat_space, unit_sphere, ISOTHERMAL_I,
                     sigma_range=(0.25, 1.4), orientation="down")
    for (s, th) in chart_grid(ch, 3, 1):
        lhs, rhs = aux_laplacian_h(flat_space, ch, s, th, 1.0)
        fd = fundamental_data(flat_space, jet_at(ch.surface, s, th),
                              ch.orientation)
        cfd = complexify(fd)
        assert fd.mean_curv == pytest.approx(1.0, abs=1e-12)
        assert lhs == pytest.approx(-cfd.lambda_conf * fd.nu / 2.0, abs=1e-5)
        assert abs(lhs - rhs) <= 1e-5


def test_flux_function_laplacian_h_cap(exp_space, cmc_cap_chart):
    for (s, th) in chart_grid(cmc_cap_chart, 4, 1):
        lhs, rhs = aux_laplacian_h(exp_space, cmc_cap_chart, s, th, 1.0)
        assert abs(lhs - rhs) <= CAP_TOL


def test_subharmonicity_witnesses(exp_space, ke_cap_chart, cmc_cap_chart):
    # downward caps under f >= 0, f' <= 0, f'' >= 0: the height plus the
    # flux function is subharmonic for the respective conformal metric
    def g_of(fd_, cfd_):
        return fd_.height + np.exp(exp_space.warp.value(fd_.height)) * fd_.nu

    for ch in (ke_cap_chart, cmc_cap_chart):
        vals = [conformal_laplacian(exp_space, ch, s, th, g_of)
                for (s, th) in chart_grid(ch, 5, 2)]
        assert min(vals) >= -1e-6


def test_check_constant():
    assert check_constant([2.0, 2.0 + 1e-8, 2.0 - 1e-8]) == \
        pytest.approx(2.0, rel=1e-8)
    with pytest.raises(NotConstantCurvature):
        check_constant([1.0, 1.1])


def test_not_constant_curvature_via_variable_ke(exp_space, ke_cap_chart):
    with pytest.raises(NotConstantCurvature):
        check_constant([1.0, 1.0001], what="K_e")


def test_minimal_identity_on_flat_disk(flat_space):
    ch = build_chart(flat_space, flat_disk(), ISOTHERMAL_I)
    lhs, rhs = minimal_graph_identity(flat_space, ch,
                                      np.mean(ch.s_range), 0.3)
    assert rhs == 0.0
    assert abs(lhs) <= 1e-10


def test_minimal_identity_on_catenoid(flat_space):
    surf = rot_graph(np.arccosh,
                     lambda r: 1.0 / np.sqrt(r * r - 1.0),
                     lambda r: -r / (r * r - 1.0) ** 1.5,
                     (1.05, 3.0))
    ch = build_chart(flat_space, surf, ISOTHERMAL_I)
    for (s, th) in chart_grid(ch, 3, 1):
        lhs, rhs = minimal_graph_identity(flat_space, ch, s, th)
        assert rhs == 0.0
        assert abs(lhs) <= 1e-5


def test_minimal_identity_with_increasing_warp():
    space = AmbientSpace(0, WarpFn.affine(0.0, 1.0))
    surf = shoot_profile(space, "minimal", 0.0, 0.3, 1.2, slope_cap=3.0)
    lo, hi = surf.param_domain[0]
    ch = build_chart(space, surf, ISOTHERMAL_I,
                     sigma_range=(0.1, 0.95 * hi), orientation="down")
    for (s, th) in chart_grid(ch, 4, 1):
        lhs, rhs = minimal_graph_identity(space, ch, s, th)
        assert abs(lhs - rhs) <= 1e-3
        assert abs(rhs) >= 1e-3     # f' = 1 keeps the right side alive


def test_laplace_beltrami_flat_quadratic():
    ident = lambda s, t: np.eye(2)
    quad = lambda s, t: s * s + t * t
    assert laplace_beltrami_fd(ident, quad, 0.3, -0.2) == \
        pytest.approx(4.0, abs=1e-9)
    scaled = lambda s, t: 4.0 * np.eye(2)
    assert laplace_beltrami_fd(scaled, quad, 0.3, -0.2) == \
        pytest.approx(1.0, abs=1e-9)


def test_laplacian_scaling_identity(rng):
    lhs, rhs = laplacian_scaling(lambda s, t: np.eye(2),
                                 lambda s, t: s * s + t * t, 1.0, 0.1, 0.2)
    assert lhs == rhs
    for _ in range(20):
        a, b, c, d = rng.uniform(-1, 1, size=4)

        def metric(s, t):
            return np.array([
                [2.0 + np.sin(a * s + b * t), 0.3 * np.cos(c * t)],
                [0.3 * np.cos(c * t), 1.5 + 0.5 * np.cos(d * s)]])

        def u(s, t):
            return np.sin(a * s + 2 * t) + np.cos(b * s * t)

        pt = rng.uniform(-1, 1, size=2)
        lhs, rhs = laplacian_scaling(metric, u, 2.5, pt[0], pt[1])
        assert abs(lhs - rhs) <= 1e-6


def test_laplacian_scaling_bad_scale():
    with pytest.raises(BadScale):
        laplacian_scaling(lambda s, t: np.eye(2), lambda s, t: s, 0.0,
                          0.0, 0.0)
    with pytest.raises(BadScale):
        laplacian_scaling(lambda s, t: np.eye(2), lambda s, t: s, -2.0,
                          0.0, 0.0)
