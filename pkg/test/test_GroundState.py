import math
import types

import pytest

np = pytest.importorskip("numpy")
pytest.importorskip("scipy")

from src import functionals
from src.errors import BracketError, CollapseError, GridError, ValidationError
from src.FieldTriple import FieldTriple, SystemParams
from src.GroundState import (GroundStateSolver, direct_quotient, pohozaev_holds, reduction_integrals,
                             reduction_triple, rescale_critical_point, sharp_constant, shooting_functional,
                             shooting_scalar, solve_ground_state, verify_pohozaev)
from src.grid import make_grid, resample
from src.utils import sup_norm


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["ground_state_112", "ground_state_221"])
def test_pohozaev_ratios(fixture, request):
    gs = request.getfixturevalue(fixture)
    assert pohozaev_holds(gs, tol=1e-6), verify_pohozaev(gs)
    assert max(gs.residuals) < 1e-9
    assert min(float(np.min(np.real(q))) for q in gs.Q) > -1e-6


@pytest.mark.slow
def test_sharp_constant_and_thresholds(ground_state_112):
    gs = ground_state_112
    assert gs.C_GN == pytest.approx(sharp_constant(gs))
    assert direct_quotient(gs) == pytest.approx(gs.C_GN, rel=1e-6)
    assert gs.J2_min == pytest.approx(3125.0 / 256.0 * gs.M ** 2, rel=1e-5)
    assert gs.ME_threshold == pytest.approx(gs.M ** 2, rel=1e-5)
    assert gs.MK_threshold == pytest.approx(5.0 * gs.M ** 2, rel=1e-5)


@pytest.mark.slow
def test_reduction_matches_petviashvili(ground_state_112, shooting_profile):
    oracle = reduction_triple(shooting_profile)
    scale = ground_state_112.Q.max_modulus()
    for a, b in zip(ground_state_112.Q, oracle):
        assert sup_norm(np.real(a) - np.real(b)) < 1e-6 * scale
    M, K, V = reduction_integrals(shooting_profile)
    assert M == pytest.approx(ground_state_112.M, rel=1e-6)
    assert K == pytest.approx(ground_state_112.K, rel=1e-6)
    assert V == pytest.approx(ground_state_112.V, rel=1e-6)


@pytest.mark.slow
def test_ground_state_solves_euler_lagrange(ground_state_112):
    gs = ground_state_112
    dv = functionals.variational_derivatives(gs.Q, gs.params)
    peak = gs.Q.max_modulus() ** 2
    for m, k, v in zip(dv.mass, dv.kinetic, dv.potential):
        assert sup_norm(m + k - v) < 1e-8 * peak


@pytest.mark.slow
def test_rescale_critical_point(ground_state_112):
    gs = ground_state_112
    g = gs.Q.grid
    moved = gs.Q.map(lambda q, i: 2.0 * resample(q, 1.25, g))
    back = rescale_critical_point(moved, gs.params)
    for a, b in zip(back, gs.Q):
        assert sup_norm(a - b) < 1e-6 * gs.Q.max_modulus()


def test_zero_seed_collapses():
    g = make_grid('radial', 5, 10.0, 128)
    with pytest.raises(CollapseError, match="collapse to zero"):
        solve_ground_state(SystemParams(1.0, 1.0, 2.0), g, seed=FieldTriple.zeros(g))


def test_solver_validation():
    p = SystemParams(1.0, 1.0, 2.0)
    with pytest.raises(GridError):
        GroundStateSolver(p, make_grid('periodic-box', 1, 8.0, 64))
    with pytest.raises(ValidationError):
        GroundStateSolver(p, make_grid('radial', 5, 10.0, 128), tol=1e-3)
    with pytest.raises(ValidationError):
        GroundStateSolver(p, make_grid('radial', 5, 10.0, 128), mixing=0.0)


def test_shooting_functional_signs():
    with pytest.raises(BracketError):
        shooting_functional(0.0)
    assert shooting_functional(1.0) == -1
    assert shooting_functional(0.5) == -1
    assert shooting_functional(40.0) == 1


def test_rescale_needs_positive_potential():
    g = make_grid('radial', 5, 10.0, 128)
    u = FieldTriple(np.exp(-g.axis() ** 2), np.zeros(g.shape), np.zeros(g.shape), g)
    with pytest.raises(ValidationError):
        rescale_critical_point(u, SystemParams(1.0, 1.0, 2.0))
    assert math.isfinite(functionals.mass(u))


@pytest.mark.slow
def test_pohozaev_check_rejects_noisy_profile(ground_state_112, rng):
    gs = ground_state_112
    noisy = gs.Q.map(lambda q, i: q * (1.0 + 0.01 * rng.standard_normal(q.shape)))
    p = gs.params
    perturbed = types.SimpleNamespace(M=functionals.mass(noisy), K=functionals.kinetic(noisy, p),
                                      V=functionals.potential(noisy))
    assert pohozaev_holds(gs)
    assert not pohozaev_holds(perturbed)


@pytest.mark.slow
def test_shooting_value_is_stable_under_tolerance(shooting_profile):
    assert 1.0 < shooting_profile.W0 < 40.0
    finer = shooting_scalar(tol=0.5e-11)
    assert finer.W0 == pytest.approx(shooting_profile.W0, rel=1e-6)


@pytest.mark.slow
def test_ground_state_is_monotone_and_box_independent(ground_state_112):
    for q in ground_state_112.Q:
        assert np.all(np.diff(np.real(q)) <= 1e-9 * np.max(np.abs(q)))
    wide = solve_ground_state(ground_state_112.params, make_grid('radial', 5, 30.0, 3072))
    assert wide.M_gs == pytest.approx(ground_state_112.M_gs, rel=1e-7)
