"""Computational grids and the differential operators defined on them.

Two kinds of grid are supported:

- ``periodic-box``: the torus ``[-L, L)^d`` with ``N`` points per axis,
  ``d`` in ``{1, 2, 3}``; derivatives are spectral.
- ``radial``: radially symmetric functions on ``R^5`` sampled at the
  staggered nodes ``r_j = (j + 1/2) r_max / N``; derivatives use fourth-order
  centered stencils with even reflection at the origin and zero extension
  past ``r_max``.
"""
import logging

import numpy as np
from scipy import fft
from scipy.interpolate import make_interp_spline
from scipy.linalg import solve_banded

from src.constants import BOX_DIMENSIONS, MIN_POINTS, RADIAL_DIMENSION
from src.errors import GridError
from src.utils import is_power_of_two, sphere_area

logger = logging.getLogger(__name__)

PERIODIC_BOX = "periodic-box"
RADIAL = "radial"
KINDS = (PERIODIC_BOX, RADIAL)

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


class Grid:
    """Uniform sampling of either a periodic box or a radial half-line.

    Use :func:`make_grid` to construct validated instances.
    """
    def __init__(self, kind, dimension, extent, points):
        self._kind = kind
        self._dimension = int(dimension)
        self._extent = float(extent)
        self._points = int(points)
        self._stencil = None

    kind = property(doc="``'periodic-box'`` or ``'radial'``.")
    dimension = property(doc="Space dimension ``d``.")
    extent = property(doc="Box half-width ``L`` or radial cutoff ``r_max``.")
    points = property(doc="Samples per axis ``N``.")
    spacing = property(doc="Mesh size: ``2L/N`` on boxes, ``r_max/N`` on radial grids.")

    @kind.getter
    def kind(self):
        return self._kind

    @dimension.getter
    def dimension(self):
        return self._dimension

    @extent.getter
    def extent(self):
        return self._extent

    @points.getter
    def points(self):
        return self._points

    @spacing.getter
    def spacing(self):
        if self.is_box:
            return 2.0 * self._extent / self._points
        return self._extent / self._points

    @property
    def is_box(self):
        return self._kind == PERIODIC_BOX

    @property
    def is_radial(self):
        return self._kind == RADIAL

    @property
    def shape(self):
        if self.is_box:
            return (self._points,) * self._dimension
        return (self._points,)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def volume(self):
        """Measure of the box (radial grids: measure of the ball of radius ``r_max``)."""
        if self.is_box:
            return (2.0 * self._extent) ** self._dimension
        return sphere_area(self._dimension) * self._extent ** self._dimension / self._dimension

    def axis(self):
        """One-dimensional sample positions."""
        j = np.arange(self._points)
        if self.is_box:
            return -self._extent + j * self.spacing
        return (j + 0.5) * self.spacing

    def wavenumbers(self):
        """Discrete wavenumbers per axis in FFT order, ``(pi/L) * {-N/2..N/2-1}``."""
        if not self.is_box:
            raise GridError("radial grids carry no Fourier wavenumbers")
        return 2.0 * np.pi * fft.fftfreq(self._points, d=self.spacing)

    def coordinates(self):
        """Mesh arrays ``(x_1, ..., x_d)`` (``ij`` indexing); radial grids return ``(r,)``."""
        if self.is_radial:
            return (self.axis(),)
        return tuple(np.meshgrid(*([self.axis()] * self._dimension), indexing='ij'))

    def wavevectors(self):
        k = self.wavenumbers()
        return tuple(np.meshgrid(*([k] * self._dimension), indexing='ij'))

    def k_squared(self):
        return sum(kj ** 2 for kj in self.wavevectors())

    def radius(self):
        """``|x|`` at every sample."""
        if self.is_radial:
            return self.axis()
        return np.sqrt(sum(x ** 2 for x in self.coordinates()))

    def weights(self):
        """Quadrature weights so that ``sum(weights * f)`` approximates ``int f``."""
        if self.is_box:
            return np.full(self.shape, self.spacing ** self._dimension)
        r = self.axis()
        return sphere_area(self._dimension) * r ** (self._dimension - 1) * self.spacing

    def quadrature(self, f):
        """Integral of a sampled density over the grid."""
        total = np.sum(np.asarray(f) * self.weights())
        return total.item()

    def check(self, f):
        if np.shape(f) != self.shape:
            raise GridError("field of shape {0} does not live on grid of shape {1}".format(
                np.shape(f), self.shape))

    def stencil(self):
        if self._stencil is None:
            self._stencil = RadialStencil(self)
        return self._stencil

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self._kind, self._dimension, self._extent, self._points) == \
            (other._kind, other._dimension, other._extent, other._points)

    def __hash__(self):
        return hash((self._kind, self._dimension, self._extent, self._points))

    def __repr__(self):
        return "Grid(kind={0!r}, dimension={1}, extent={2}, points={3})".format(
            self._kind, self._dimension, self._extent, self._points)

    def __getstate__(self):
        state = self.__dict__.copy()
        state['_stencil'] = None
        return state


class RadialStencil:
    """Banded fourth-order operators on the staggered radial mesh.

    Row ``m + 2`` of a coefficient array multiplies ``f[j + m]`` in the
    equation for node ``j``. Ghost nodes inside the origin are folded back by
    even reflection; nodes beyond ``r_max`` are zero.
    """
    def __init__(self, grid):
        assert grid.is_radial
        self.n = grid.points
        h = grid.spacing
        r = grid.axis()
        d = grid.dimension
        first = _D1[:, None] / h * np.ones((1, self.n))
        self.first = self._fold_origin(first)
        second = _D2[:, None] / h ** 2 + (d - 1) / r[None, :] * _D1[:, None] / h
        self.laplacian = self._fold_origin(second)

    @staticmethod
    def _fold_origin(coef):
        coef = coef.copy()
        # f(r_{-1}) = f(r_0), f(r_{-2}) = f(r_1)
        coef[2, 0] += coef[1, 0]
        coef[3, 0] += coef[0, 0]
        coef[1, 1] += coef[0, 1]
        coef[0, :2] = 0.0
        coef[1, 0] = 0.0
        return coef

    def apply(self, coef, f):
        n = self.n
        padded = np.zeros(n + 4, dtype=np.result_type(f, coef))
        padded[2:n + 2] = f
        out = np.zeros(n, dtype=padded.dtype)
        for m in range(-2, 3):
            out += coef[m + 2] * padded[2 + m:2 + m + n]
        return out

    def banded(self, coef, diagonal, scale):
        """``diagonal * I + scale * coef`` in ``solve_banded`` layout."""
        n = self.n
        ab = np.zeros((5, n), dtype=np.result_type(coef, diagonal, scale))
        for m in range(-2, 3):
            i = np.arange(max(0, -m), n - max(0, m))
            ab[2 - m, i + m] = scale * coef[m + 2, i]
        ab[2] += diagonal
        return ab

    def solve(self, ab, rhs):
        return solve_banded((2, 2), ab, rhs)


def make_grid(kind, dimension, extent, points):
    """Build a validated :class:`Grid`.

    Parameters
    ----------
    kind : str
        ``'periodic-box'`` or ``'radial'``.
    dimension : int
        ``1``, ``2`` or ``3`` for boxes, ``5`` for radial grids.
    extent : float
        Box half-width or radial cutoff, positive.
    points : int
        Samples per axis, at least 8; a power of two on boxes.
    """
    if kind not in KINDS:
        raise GridError("unknown grid kind {0!r}".format(kind))
    if points < MIN_POINTS:
        raise GridError("points must be >= {0}, got {1}".format(MIN_POINTS, points))
    if not extent > 0:
        raise GridError("extent must be positive, got {0}".format(extent))
    if kind == PERIODIC_BOX:
        if dimension not in BOX_DIMENSIONS:
            raise GridError("periodic-box dimension must be one of {0}, got {1}".format(BOX_DIMENSIONS, dimension))
        if not is_power_of_two(points):
            raise GridError("N not a power of two: {0}".format(points))
    elif dimension != RADIAL_DIMENSION:
        raise GridError("radial grids are {0}-dimensional, got {1}".format(RADIAL_DIMENSION, dimension))
    return Grid(kind, dimension, extent, points)


def _spectrum(f, g):
    return fft.fftn(np.asarray(f, dtype=complex), axes=tuple(range(g.dimension)))


def _inverse(f_hat, g):
    return fft.ifftn(f_hat, axes=tuple(range(g.dimension)))


def gradient(f, g):
    """Gradient of ``f``: a list of ``d`` complex fields (one on radial grids, ``d/dr``)."""
    g.check(f)
    if g.is_radial:
        stencil = g.stencil()
        return [stencil.apply(stencil.first, np.asarray(f, dtype=complex))]
    f_hat = _spectrum(f, g)
    return [_inverse(1j * kj * f_hat, g) for kj in g.wavevectors()]


def laplacian_kappa(f, kappa, g):
    """``kappa * Laplacian(f)``."""
    g.check(f)
    if g.is_radial:
        stencil = g.stencil()
        return kappa * stencil.apply(stencil.laplacian, np.asarray(f, dtype=complex))
    return _inverse(-kappa * g.k_squared() * _spectrum(f, g), g)


def resolvent(f, c, kappa, g):
    """Solve ``(c - kappa * Laplacian) v = f`` for ``v``."""
    g.check(f)
    if g.is_radial:
        stencil = g.stencil()
        ab = stencil.banded(stencil.laplacian, float(c), -float(kappa))
        return stencil.solve(ab, f)
    return _inverse(_spectrum(f, g) / (c + kappa * g.k_squared()), g)


def resample(f, lam, g):
    """Evaluate ``f(lam * x)`` at the grid samples.

    Boxes use the trigonometric interpolant of ``f`` (an exact band-limited
    resampling); samples with any ``|lam * x_j| >= L`` get zero instead of a
    periodic image. Radial grids use a quintic spline of the even extension;
    points with ``lam * r`` past the last node get zero.
    """
    g.check(f)
    f = np.asarray(f, dtype=complex)
    if g.is_radial:
        h = g.spacing
        r = g.axis()
        nodes = np.concatenate((-r[::-1], r, [r[-1] + h, r[-1] + 2 * h]))
        values = np.concatenate((f[::-1], f, [0.0, 0.0]))
        target = lam * r
        out = np.zeros(g.points, dtype=complex)
        inside = target <= nodes[-1]
        for part, unit in ((np.real, 1.0), (np.imag, 1j)):
            spline = make_interp_spline(nodes, part(values), k=5)
            out[inside] += unit * spline(target[inside])
        return out
    x = g.axis()
    k = g.wavenumbers()
    basis = np.exp(1j * np.outer(lam * x + g.extent, k)) / g.points
    basis[np.abs(lam * x) >= g.extent] = 0.0
    out = _spectrum(f, g)
    for axis in range(g.dimension):
        out = np.moveaxis(np.tensordot(basis, out, axes=([1], [axis])), 0, axis)
    return out
