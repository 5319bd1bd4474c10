import numpy as np
import pytest

from warpgeo.ambient import AmbientSpace, WarpFn
from warpgeo.conformal import CONFORMAL_II, ISOTHERMAL_I, build_chart
from warpgeo.graphsolve import CapProblem, shoot_cap, surface_from_cap
from warpgeo.immersion import euclid_sphere


@pytest.fixture(scope="session")
def flat_space():
    return AmbientSpace(0, WarpFn.const(0.0))


@pytest.fixture(scope="session")
def exp_space():
    # f(t) = e^{-t}: f >= 0, f' <= 0, f'' >= 0 on t >= 0
    return AmbientSpace(0, WarpFn.exp_scaled(1.0, -1.0))


@pytest.fixture(scope="session")
def unit_sphere():
    return euclid_sphere(1.0)


@pytest.fixture(scope="session")
def sphere_chart_ii(flat_space, unit_sphere):
    return build_chart(flat_space, unit_sphere, CONFORMAL_II)


@pytest.fixture(scope="session")
def sphere_chart_iso(flat_space, unit_sphere):
    return build_chart(flat_space, unit_sphere, ISOTHERMAL_I)


def _tight(mode, space, target, apex):
    problem = CapProblem(mode=mode, space=space, target=target,
                         apex_height=apex, method="DOP853",
                         rtol=1e-12, atol=1e-14, profile_points=201)
    return problem, shoot_cap(problem)


@pytest.fixture(scope="session")
def ke_cap(exp_space):
    """Constant extrinsic curvature cap (K_e = 1) in the e^{-t} warp."""
    return _tight("ke", exp_space, 1.0, 0.6)


@pytest.fixture(scope="session")
def cmc_cap(exp_space):
    """Constant mean curvature cap (H = 1) in the e^{-t} warp."""
    return _tight("cmc", exp_space, 1.0, 0.6)


@pytest.fixture(scope="session")
def ke_cap_chart(exp_space, ke_cap):
    _, cap = ke_cap
    surf = surface_from_cap(exp_space, cap, (0.08, cap._phase_a_end * 0.9))
    return build_chart(exp_space, surf, CONFORMAL_II, n_tab=800)


@pytest.fixture(scope="session")
def cmc_cap_chart(exp_space, cmc_cap):
    _, cap = cmc_cap
    surf = surface_from_cap(exp_space, cap, (0.08, cap._phase_a_end * 0.9))
    return build_chart(exp_space, surf, ISOTHERMAL_I, n_tab=800,
                       orientation="down")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
