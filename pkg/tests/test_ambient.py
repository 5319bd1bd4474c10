import numpy as np
import pytest

from warpgeo.ambient import AmbientSpace, WarpFn, model_factor
from warpgeo.errors import BadInput, DomainError

ALL_WARPS = [WarpFn.const(0.3), WarpFn.affine(0.1, 0.5),
             WarpFn.exp_scaled(1.0, -1.0), WarpFn.quadratic(0.1, 0.2, 0.3)]


def test_model_factor_values():
    assert model_factor(0, 3.7, -2.1) == 1.0
    assert model_factor(1, 0.0, 0.0) == 2.0
    assert model_factor(-1, 0.5, 0.5) == pytest.approx(4.0, abs=1e-15)


def test_model_factor_matches_formula():
    rng = np.random.default_rng(1)
    for kappa in (-1, 1):
        for _ in range(50):
            x, y = rng.uniform(-0.6, 0.6, size=2)
            lam = model_factor(kappa, x, y)
            assert lam == pytest.approx(2.0 / (1.0 + kappa * (x * x + y * y)),
                                        rel=1e-15)
            assert lam > 0


def test_model_factor_domain_error():
    with pytest.raises(DomainError):
        model_factor(-1, 0.8, 0.8)
    with pytest.raises(DomainError):
        model_factor(-1, 1.0, 0.0)


@pytest.mark.parametrize("warp", ALL_WARPS, ids=lambda w: w.family)
def test_warp_derivatives_match_finite_differences(warp):
    for t in np.linspace(-1.5, 2.5, 11):
        for step in (1e-3, 1e-4):
            fd1 = (warp.value(t + step) - warp.value(t - step)) / (2 * step)
            fd2 = (warp.value(t + step) - 2 * warp.value(t)
                   + warp.value(t - step)) / step**2
            assert abs(warp.d1(t) - fd1) <= 20.0 * step**2
            # second difference carries an eps/step^2 rounding floor
            assert abs(warp.d2(t) - fd2) <= 20.0 * step**2 + 1e-6
            assert np.isfinite([warp.value(t), warp.d1(t), warp.d2(t)]).all()


def test_warp_serialization_roundtrip():
    for warp in ALL_WARPS:
        rec = warp.to_json()
        assert rec["family"] == warp.family
        assert WarpFn.from_json(rec) == warp
    assert WarpFn.from_json({"family": "ExpScaled", "a": 1.0, "b": -1.0}) \
        == WarpFn.exp_scaled(1.0, -1.0)


def test_warp_bad_records():
    with pytest.raises(BadInput):
        WarpFn.from_json({"family": "Cubic", "a": 1.0})
    with pytest.raises(BadInput):
        WarpFn.from_json({"a": 1.0})
    with pytest.raises(BadInput):
        WarpFn.from_json({"family": "Affine", "a": 1.0})  # missing b


def test_metric_examples():
    flat = AmbientSpace(0, WarpFn.const(0.0))
    assert np.allclose(flat.metric([0.3, 5.0, -2.0]), np.eye(3))

    lin = AmbientSpace(0, WarpFn.affine(0.0, 1.0))
    assert np.allclose(lin.metric([1.0, 0.0, 0.0]),
                       np.diag([1.0, np.e**2, np.e**2]))

    sph = AmbientSpace(1, WarpFn.const(0.0))
    assert np.allclose(sph.metric([0.0, 0.0, 0.0]), np.diag([1.0, 4.0, 4.0]))


def test_metric_positive_definite():
    rng = np.random.default_rng(2)
    for kappa in (-1, 0, 1):
        space = AmbientSpace(kappa, WarpFn.quadratic(0.2, -0.1, 0.4))
        for _ in range(30):
            p = np.array([rng.uniform(-2, 2), rng.uniform(-0.5, 0.5),
                          rng.uniform(-0.5, 0.5)])
            g = space.metric(p)
            # leading principal minors
            assert g[0, 0] > 0
            assert np.linalg.det(g[:2, :2]) > 0
            assert np.linalg.det(g) > 0


def test_bad_kappa_rejected():
    with pytest.raises(BadInput):
        AmbientSpace(2, WarpFn.const(0.0))


def test_christoffels_flat_all_zero():
    flat = AmbientSpace(0, WarpFn.const(0.0))
    gam = flat.christoffels([0.4, 1.0, -0.7])
    assert np.allclose(gam, 0.0, atol=1e-15)


def test_christoffels_linear_warp_hand_values():
    # metric diag(1, e^{2t}, e^{2t}): Gamma^t_xx = -e^{2t}, Gamma^x_tx = f'
    space = AmbientSpace(0, WarpFn.affine(0.0, 1.0))
    gam = space.christoffels([0.0, 0.0, 0.0])
    assert gam[0, 1, 1] == pytest.approx(-1.0, abs=1e-14)
    assert gam[1, 0, 1] == pytest.approx(1.0, abs=1e-14)
    assert gam[2, 0, 2] == pytest.approx(1.0, abs=1e-14)


def test_christoffels_no_t_dependence_for_const_warp():
    # constant warp: the metric never depends on t, so Gamma^t_{ij} carries
    # only the -d_t g term, which vanishes for i or j = t as well
    space = AmbientSpace(1, WarpFn.const(0.0))
    gam = space.christoffels([0.0, 0.0, 0.0])
    assert np.allclose(gam[0], 0.0, atol=1e-15)


def _fd_metric_partials(space, p, h=1e-5):
    dg = np.zeros((3, 3, 3))
    for i in range(3):
        pp, pm = np.array(p, float), np.array(p, float)
        pp[i] += h
        pm[i] -= h
        dg[i] = (space.metric(pp) - space.metric(pm)) / (2 * h)
    return dg


@pytest.mark.parametrize("kappa", [-1, 0, 1])
@pytest.mark.parametrize("warp", ALL_WARPS, ids=lambda w: w.family)
def test_metric_compatibility_and_symmetry(kappa, warp):
    space = AmbientSpace(kappa, warp)
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = np.array([rng.uniform(-1, 1), rng.uniform(-0.45, 0.45),
                      rng.uniform(-0.45, 0.45)])
        g = space.metric(p)
        dg = space.metric_partials(p)
        gam = space.christoffels(p)
        assert np.array_equal(gam, gam.transpose(0, 2, 1))
        # d_i g_jk - Gamma^l_ij g_lk - Gamma^l_ik g_jl = 0
        comp = dg - np.einsum("lij,lk->ijk", gam, g) \
            - np.einsum("lik,jl->ijk", gam, g)
        assert abs(comp).max() <= 1e-8
        # closed-form partials against the FD oracle (relative scale)
        scale = max(1.0, abs(dg).max())
        assert abs(dg - _fd_metric_partials(space, p)).max() <= 5e-6 * scale


def test_geometry_pack_consistency():
    space = AmbientSpace(-1, WarpFn.exp_scaled(0.5, 0.3))
    p = [0.2, 0.3, -0.1]
    g, ginv, gam = space.geometry(p)
    assert np.allclose(g, space.metric(p))
    assert np.allclose(g @ ginv, np.eye(3), atol=1e-14)
    assert np.allclose(gam, space.christoffels(p))
