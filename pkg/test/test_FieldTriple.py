import pytest

np = pytest.importorskip("numpy")

from src.errors import GridError, ValidationError
from src.FieldTriple import FieldTriple, SystemParams, gaussian_triple, random_smooth_triple
from src.grid import make_grid


def test_params_validation():
    with pytest.raises(ValidationError):
        SystemParams(1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        SystemParams(1.0, 1.0, float('nan'))


def test_mass_resonance():
    assert SystemParams(2.0, 2.0, 1.0).mass_resonant
    assert SystemParams(3.0, 1.5, 1.0).mass_resonant
    assert not SystemParams(1.0, 1.0, 1.0).mass_resonant
    assert SystemParams(1.0, 1.0, 1.0).resonance_defect == pytest.approx(-1.0)
    assert SystemParams(1.0, 1.0, 2.0).kappa_product == 2.0


def test_fields_are_read_only(box_1d):
    u = gaussian_triple(box_1d, (1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        u.u1[0] = 5.0


def test_fields_are_copied(box_1d):
    raw = np.ones(box_1d.shape)
    u = FieldTriple(raw, raw, raw, box_1d)
    raw[0] = 7.0
    assert u.u1[0] == 1.0


def test_arithmetic_and_modulus(box_1d):
    u = gaussian_triple(box_1d, (3.0, 0.0, 4.0), width=2.0)
    assert np.allclose((u + u - u).u3, u.u3)
    assert u.max_modulus() == pytest.approx(5.0, rel=1e-12)
    assert np.allclose(u.scaled(2.0).modulus(), 2.0 * u.modulus())
    assert u.is_finite()


def test_grid_mismatch(box_1d, box_2d):
    with pytest.raises(GridError):
        FieldTriple(np.zeros(box_2d.shape), np.zeros(box_1d.shape), np.zeros(box_1d.shape), box_1d)
    other = make_grid('periodic-box', 1, 8.0, 128)
    with pytest.raises(GridError):
        FieldTriple.zeros(box_1d) + FieldTriple.zeros(other)


def test_gaussian_momentum_is_a_phase(box_2d):
    plain = gaussian_triple(box_2d, (1.0, 1.0, 1.0), center=(1.0, -1.0))
    moving = gaussian_triple(box_2d, (1.0, 1.0, 1.0), center=(1.0, -1.0), momentum=(0.5, 0.25))
    assert np.allclose(plain.modulus(), moving.modulus())
    peak = np.unravel_index(np.argmax(plain.modulus()), box_2d.shape)
    assert [x[peak] for x in box_2d.coordinates()] == pytest.approx([1.0, -1.0])


def test_random_triple_is_reproducible(box_1d):
    a = random_smooth_triple(box_1d, np.random.default_rng(7))
    b = random_smooth_triple(box_1d, np.random.default_rng(7))
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert np.max(np.abs(a.u1[:4])) < 1e-6
