import math

import pytest

np = pytest.importorskip("numpy")
pytest.importorskip("scipy")

from src.errors import GridError
from src.grid import gradient, laplacian_kappa, make_grid, resample, resolvent


@pytest.mark.parametrize("args, message", [
    (('periodic-box', 1, 8.0, 100), "N not a power of two"),
    (('periodic-box', 4, 8.0, 16), "dimension"),
    (('radial', 3, 8.0, 64), "radial grids are 5-dimensional"),
    (('radial', 5, 8.0, 4), "points must be"),
    (('radial', 5, -1.0, 64), "extent must be positive"),
    (('sphere', 2, 1.0, 16), "unknown grid kind"),
])
def test_make_grid_rejects(args, message):
    with pytest.raises(GridError, match=message):
        make_grid(*args)


def test_grid_layout():
    box = make_grid('periodic-box', 2, 4.0, 16)
    assert box.shape == (16, 16)
    assert box.spacing == 0.5
    assert box.axis()[0] == -4.0
    assert math.isclose(box.volume, 64.0)
    rad = make_grid('radial', 5, 10.0, 100)
    assert rad.shape == (100,)
    assert math.isclose(rad.axis()[0], 0.05)
    with pytest.raises(GridError):
        rad.wavenumbers()


def test_box_quadrature_of_gaussian(box_2d):
    r = box_2d.radius()
    assert box_2d.quadrature(np.exp(-r ** 2)) == pytest.approx(math.pi, rel=1e-12)


def test_radial_quadrature_of_gaussian(radial):
    r = radial.radius()
    assert radial.quadrature(np.exp(-r ** 2)) == pytest.approx(math.pi ** 2.5, rel=1e-10)


def test_spectral_gradient(box_1d):
    x = box_1d.axis()
    k = 3 * math.pi / box_1d.extent
    (dx,) = gradient(np.sin(k * x), box_1d)
    assert np.max(np.abs(dx - k * np.cos(k * x))) < 1e-10


def test_radial_laplacian_of_gaussian():
    g = make_grid('radial', 5, 10.0, 1024)
    r = g.axis()
    f = np.exp(-r ** 2)
    exact = (4 * r ** 2 - 10) * f
    assert np.max(np.abs(laplacian_kappa(f, 1.0, g) - exact)) < 1e-6


def test_radial_gradient_of_gaussian():
    g = make_grid('radial', 5, 10.0, 1024)
    r = g.axis()
    (dr,) = gradient(np.exp(-r ** 2), g)
    assert np.max(np.abs(dr + 2 * r * np.exp(-r ** 2))) < 1e-6


def test_radial_operators_are_fourth_order():
    errors = {'gradient': [], 'laplacian': []}
    for points in (128, 256):
        g = make_grid('radial', 5, 10.0, points)
        r = g.axis()
        f = np.exp(-r ** 2)
        errors['gradient'].append(np.max(np.abs(gradient(f, g)[0] + 2 * r * f)))
        errors['laplacian'].append(np.max(np.abs(laplacian_kappa(f, 1.0, g) - (4 * r ** 2 - 10) * f)))
    for coarse, fine in errors.values():
        assert math.log2(coarse / fine) >= 3.5


def test_box_integration_by_parts(box_2d):
    x, y = box_2d.coordinates()
    f = np.exp(-(x ** 2 + y ** 2)) * np.exp(0.3j * x)
    h = np.exp(-((x - 1) ** 2 + y ** 2) / 2)
    lhs = box_2d.quadrature(np.conj(f) * laplacian_kappa(h, 1.0, box_2d))
    rhs = -sum(box_2d.quadrature(np.conj(a) * b) for a, b in zip(gradient(f, box_2d), gradient(h, box_2d)))
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_box_resolvent_inverts_operator(box_2d):
    f = np.exp(-box_2d.radius() ** 2)
    v = resolvent(f, 2.0, 0.5, box_2d)
    back = 2.0 * v - laplacian_kappa(v, 0.5, box_2d)
    assert np.max(np.abs(back - f)) < 1e-12


def test_radial_resolvent_inverts_stencil():
    g = make_grid('radial', 5, 10.0, 256)
    f = np.exp(-g.axis() ** 2)
    v = resolvent(f, 1.0, 2.0, g)
    back = v - laplacian_kappa(v, 2.0, g)
    assert np.max(np.abs(back - f)) < 1e-10


def test_resample_box(box_1d):
    x = box_1d.axis()
    out = resample(np.exp(-x ** 2), 0.5, box_1d)
    assert np.max(np.abs(out - np.exp(-x ** 2 / 4))) < 1e-10


def test_resample_box_contracts_without_periodic_images(box_1d):
    x = box_1d.axis()
    out = resample(np.exp(-x ** 2 / 9), 3.0, box_1d)
    assert np.max(np.abs(out - np.exp(-x ** 2))) < 1e-10
    assert np.all(out[np.abs(3.0 * x) >= box_1d.extent] == 0.0)


def test_resample_radial():
    g = make_grid('radial', 5, 10.0, 1024)
    r = g.axis()
    out = resample(np.exp(-r ** 2), 0.5, g)
    assert np.max(np.abs(out - np.exp(-r ** 2 / 4))) < 1e-8


def test_field_shape_is_checked(box_1d):
    with pytest.raises(GridError):
        gradient(np.zeros(10), box_1d)
