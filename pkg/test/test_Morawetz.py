import logging
import math

import pytest

np = pytest.importorskip("numpy")
pytest.importorskip("scipy")

from src.CutoffCreator import Cutoff
from src.errors import GridError, SpanError
from src.FieldTriple import FieldTriple, SystemParams, gaussian_triple, random_smooth_triple
from src.grid import make_grid
from src.Morawetz import (MorawetzWeights, averaged_estimate, build_weights, c_plus_e_frames,
                          coercivity_on_balls, cutoff_kinetic_identity, edge_mass_fraction, localized_momentum,
                          log_radius_nodes, morawetz_functional, select_xi, term_decomposition, term_series, weight_identities)
from src.Propagator import EvolveConfig, Trajectory, evolve, phase_boost
from src.Snapshot import Snapshot


@pytest.fixture
def line():
    return make_grid('periodic-box', 1, 32.0, 256)


@pytest.fixture
def fine_line():
    return make_grid('periodic-box', 1, 32.0, 1024)


@pytest.fixture
def plane():
    return make_grid('periodic-box', 2, 16.0, 128)


def test_phi_tends_to_one_at_the_origin():
    w = MorawetzWeights(Cutoff(0.02), 1.0, 1)
    assert w.phi_at(np.array([0.0]))[0] == pytest.approx(1.0, abs=0.02)
    assert w.phi_at(np.array([2.5]))[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("d", [1, 2])
def test_weight_identities(d):
    w = MorawetzWeights(Cutoff(0.4), 1.0, d)
    checks = weight_identities(w)
    assert checks.laplacian_defect < 1e-5
    assert checks.min_gap >= -1e-10
    assert math.isfinite(checks.grad_phi_constant)
    assert checks.phi_one_constant < 10.0


def test_weights_scale_with_R():
    unit = MorawetzWeights(Cutoff(0.3), 1.0, 1)
    wide = MorawetzWeights(Cutoff(0.3), 3.0, 1)
    r = np.linspace(0.0, 4.0, 9)
    assert np.allclose(wide.phi_at(3.0 * r), unit.phi_at(r))
    assert np.allclose(wide.a_at(3.0 * r), 9.0 * unit.a_at(r))


def test_build_weights_support_overflow(line):
    with pytest.raises(SpanError, match="support overflow"):
        build_weights(Cutoff(0.3), 9.0, line)
    with pytest.raises(GridError):
        build_weights(Cutoff(0.3), 1.0, make_grid('radial', 5, 10.0, 64))


def test_frame_selection(line):
    p = SystemParams(2.0, 2.0, 1.0)
    c = Cutoff(0.4)
    real = gaussian_triple(line, (1.0, 0.5, 0.25))
    assert np.all(select_xi(real, (0.0,), 4.0, c, p) == 0.0)
    u = gaussian_triple(line, (1.0, 0.5j, 0.25), width=2.0, momentum=(0.3,))
    xi = select_xi(u, (1.0,), 4.0, c, p)
    assert xi[0] < 0.0
    boosted = phase_boost(u, xi, p)
    scale = line.quadrature(sum(np.abs(ui) ** 2 for ui in u))
    assert np.all(np.abs(localized_momentum(boosted, (1.0,), 4.0, c)) < 1e-10 * scale)
    empty = FieldTriple.zeros(line)
    assert np.all(select_xi(empty, (0.0,), 4.0, c, p) == 0.0)


def test_functional_symmetries(line, rng):
    p = SystemParams(2.0, 2.0, 1.0)
    w = build_weights(Cutoff(0.4), 4.0, line)
    real = gaussian_triple(line, (1.0, 0.5, 0.25))
    assert morawetz_functional(real, w, p) == pytest.approx(0.0, abs=1e-12)
    u = random_smooth_triple(line, rng)
    assert morawetz_functional(u.conj(), w, p) == pytest.approx(-morawetz_functional(u, w, p), rel=1e-10)


def test_sign_and_boost_invariance(plane, rng):
    p = SystemParams(2.0, 2.0, 1.0)
    w = build_weights(Cutoff(0.4), 3.0, plane)
    xi = (math.pi / 8, -math.pi / 8)
    for _ in range(5):
        u = random_smooth_triple(plane, rng, terms=2)
        terms = term_decomposition(u, w, p)
        scale = abs(terms.D) + abs(terms.F) + abs(terms.C) + abs(terms.E)
        assert terms.D_plus_F >= -1e-10 * scale
        assert terms.C_plus_E >= -1e-10 * scale
        moved = term_decomposition(phase_boost(u, xi, p), w, p)
        assert moved.C_plus_E == pytest.approx(terms.C_plus_E, rel=1e-8, abs=1e-10 * scale)


def test_frame_form_of_c_plus_e(line, rng):
    p = SystemParams(2.0, 2.0, 1.0)
    c = Cutoff(0.4)
    w = build_weights(c, 6.0, line)
    u = random_smooth_triple(line, rng)
    terms = term_decomposition(u, w, p)
    frames = c_plus_e_frames(u, 6.0, c, p)
    assert frames.total == pytest.approx(terms.C_plus_E, rel=1e-3)
    assert terms.J == frames.total
    assert np.all(frames.frames >= -1e-10 * np.max(np.abs(frames.frames)))
    assert np.min(w.kernels(line).gap) >= -1e-10


@pytest.mark.slow
@pytest.mark.parametrize("kappas", [(2.0, 2.0, 1.0), (1.0, 2.0, 0.5)])
def test_terms_sum_to_the_time_derivative(line, kappas):
    p = SystemParams(*kappas)
    u0 = random_smooth_triple(line, np.random.default_rng(11))
    w = build_weights(Cutoff(0.4), 4.0, line)
    traj = evolve(u0, EvolveConfig(dt=0.002, T=0.01), p)
    rows = term_series(traj, w, p)
    assert math.isnan(rows[0]['dM/dt']) and math.isnan(rows[-1]['dM/dt'])
    for row in rows[1:-1]:
        scale = sum(abs(row[name]) for name in 'ABCDEFX')
        assert abs(row['sum'] - row['dM/dt']) < 1e-3 * scale
        assert row['D+F'] >= -1e-10 * scale
        regrouped = row['A'] + row['G'] + row['H'] + row['I'] + row['J'] + row['X']
        assert abs(regrouped - (row['A'] + row['B'] + row['C+E'] + row['X'])) < 1e-3 * scale


def test_cutoff_kinetic_identity(fine_line, rng):
    u = random_smooth_triple(fine_line, rng)
    for lhs, rhs in cutoff_kinetic_identity(u, (0.5,), 6.0, Cutoff(0.4)):
        assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-12)


def test_coercivity_on_empty_ball(line):
    report = coercivity_on_balls(FieldTriple.zeros(line), (0.0,), 4.0, Cutoff(0.4), SystemParams(1.0, 1.0, 2.0))
    assert math.isnan(report.ratio)


def test_log_radius_nodes():
    radii, weights = log_radius_nodes(2.0, 1.5)
    assert len(radii) == 16
    assert weights.sum() == pytest.approx(1.5)
    assert radii[0] > 2.0 and radii[-1] < 2.0 * math.exp(1.5)


def test_zero_field_estimate(line):
    p = SystemParams(2.0, 2.0, 1.0)
    traj = Trajectory([Snapshot(t, p, FieldTriple.zeros(line)) for t in np.linspace(0.0, 2.0, 5)], p)
    report = averaged_estimate(traj, 2.0, 1.0, 2.0, 0.4, p)
    assert report.lhs == 0.0
    assert report.ratio == 0.0
    assert report.delta == 1.0 and report.delta_measured


def test_estimate_on_a_short_run(line, tmp_path):
    p = SystemParams(2.0, 2.0, 1.0)
    u0 = gaussian_triple(line, (0.5, 0.5, 0.5), momentum=(0.25,))
    traj = evolve(u0, EvolveConfig(dt=0.01, T=0.5, record_every=10), p)
    report = averaged_estimate(traj, 2.0, 1.0, 0.5, 0.4, p, delta=1.0)
    assert report.lhs > 0.0
    assert report.nu == pytest.approx(2.0 * math.e / 0.5 + 0.4)
    assert report.ratio == pytest.approx(report.lhs / (report.nu * report.E0 ** 2))
    report.to_csv(tmp_path / "morawetz.csv")
    assert (tmp_path / "morawetz.csv").read_text().startswith("t,R,s,xi1,frame_sum,weighted")
    with pytest.raises(SpanError, match="insufficient trajectory span"):
        averaged_estimate(traj, 2.0, 1.0, 5.0, 0.4, p)


def test_edge_mass_guard(line, caplog):
    p = SystemParams(2.0, 2.0, 1.0)
    w = build_weights(Cutoff(0.4), 4.0, line)
    centred = gaussian_triple(line, (1.0, 0.5, 0.25))
    assert edge_mass_fraction(centred, 4.0) < 1e-12
    with caplog.at_level(logging.WARNING, logger="src.Morawetz"):
        assert term_decomposition(centred, w, p).edge_mass < 1e-12
    assert "box boundary" not in caplog.text
    near_edge = gaussian_triple(line, (1.0, 0.5, 0.25), center=(31.0,))
    with caplog.at_level(logging.WARNING, logger="src.Morawetz"):
        terms = term_decomposition(near_edge, w, p)
    assert terms.edge_mass > 0.4
    assert terms.as_dict()['edge_mass'] == terms.edge_mass
    assert "box boundary" in caplog.text


def test_coercivity_on_a_small_bump(plane):
    p = SystemParams(2.0, 2.0, 1.0)
    small = coercivity_on_balls(gaussian_triple(plane, (0.5, 0.5, 0.5)), (0.0, 0.0), 4.0, Cutoff(0.4), p)
    assert small.kinetic_local > 0 and small.potential_local > 0
    assert small.ratio == pytest.approx((4 * small.kinetic_local - 5 * small.potential_local) / small.kinetic_local)
    assert small.ratio > 0
    large = coercivity_on_balls(gaussian_triple(plane, (10.0, 10.0, 10.0)), (0.0, 0.0), 4.0, Cutoff(0.4), p)
    assert large.ratio < 0


@pytest.mark.slow
def test_estimate_is_stable_under_refinement():
    p = SystemParams(2.0, 2.0, 1.0)
    runs = [(256, 0.01, 10), (256, 0.005, 20), (512, 0.01, 10)]
    ratios = []
    for points, dt, every in runs:
        g = make_grid('periodic-box', 1, 32.0, points)
        u0 = gaussian_triple(g, (0.5, 0.5, 0.5), momentum=(0.25,))
        traj = evolve(u0, EvolveConfig(dt=dt, T=0.5, record_every=every), p)
        ratios.append(averaged_estimate(traj, 2.0, 1.0, 0.5, 0.4, p, delta=1.0).ratio)
    assert ratios[0] > 0
    for other in ratios[1:]:
        assert other == pytest.approx(ratios[0], rel=0.2)
