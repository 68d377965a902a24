from dataclasses import dataclass

import numpy as np

from src.constants import MASS_RESONANCE_RTOL
from src.errors import GridError, ValidationError


@dataclass(frozen=True)
class SystemParams:
    """Dispersion coefficients ``(kappa1, kappa2, kappa3)`` of the system."""
    kappa1: float
    kappa2: float
    kappa3: float

    def __post_init__(self):
        for name in ('kappa1', 'kappa2', 'kappa3'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValidationError("{0} must be positive, got {1}".format(name, value))

    @property
    def kappas(self):
        return (self.kappa1, self.kappa2, self.kappa3)

    @property
    def kappa_product(self):
        return self.kappa1 * self.kappa2 * self.kappa3

    @property
    def resonance_defect(self):
        """``1/kappa3 - 1/kappa1 - 1/kappa2``; zero under mass resonance."""
        return 1.0 / self.kappa3 - 1.0 / self.kappa1 - 1.0 / self.kappa2

    @property
    def mass_resonant(self):
        lhs = 1.0 / self.kappa3
        rhs = 1.0 / self.kappa1 + 1.0 / self.kappa2
        return abs(lhs - rhs) <= MASS_RESONANCE_RTOL * max(lhs, rhs)


class FieldTriple:
    """The state ``u = (u1, u2, u3)``: three complex fields on one grid.

    The stored arrays are private read-only copies, so a triple can be shared
    freely; every operation returns a new triple.
    """
    def __init__(self, u1, u2, u3, grid):
        fields = []
        for u in (u1, u2, u3):
            arr = np.array(u, dtype=complex)
            grid.check(arr)
            arr.flags.writeable = False
            fields.append(arr)
        self._fields = tuple(fields)
        self._grid = grid

    @classmethod
    def zeros(cls, grid):
        z = np.zeros(grid.shape, dtype=complex)
        return cls(z, z, z, grid)

    @classmethod
    def from_stack(cls, stack, grid):
        return cls(stack[0], stack[1], stack[2], grid)

    grid = property(doc="The shared :class:`src.grid.Grid`.")

    @grid.getter
    def grid(self):
        return self._grid

    @property
    def u1(self):
        return self._fields[0]

    @property
    def u2(self):
        return self._fields[1]

    @property
    def u3(self):
        return self._fields[2]

    @property
    def components(self):
        return self._fields

    def __iter__(self):
        return iter(self._fields)

    def __getitem__(self, i):
        return self._fields[i]

    def stack(self):
        return np.stack(self._fields)

    def map(self, func):
        """Apply ``func(field, index)`` to every component."""
        return FieldTriple(*(func(u, i) for i, u in enumerate(self._fields)), self._grid)

    def scaled(self, factor):
        return self.map(lambda u, i: factor * u)

    def conj(self):
        return self.map(lambda u, i: np.conj(u))

    def __add__(self, other):
        self._check_same_grid(other)
        return FieldTriple(*(a + b for a, b in zip(self, other)), self._grid)

    def __sub__(self, other):
        self._check_same_grid(other)
        return FieldTriple(*(a - b for a, b in zip(self, other)), self._grid)

    def modulus(self):
        """Euclidean norm of the three moduli at every sample."""
        return np.sqrt(sum(np.abs(u) ** 2 for u in self._fields))

    def max_modulus(self):
        return float(np.max(self.modulus()))

    def is_finite(self):
        return all(np.all(np.isfinite(u)) for u in self._fields)

    def _check_same_grid(self, other):
        if other.grid != self._grid:
            raise GridError("field triples live on different grids")

    def __repr__(self):
        return "FieldTriple(grid={0!r})".format(self._grid)


def gaussian_triple(grid, amplitudes, width=1.0, center=None, momentum=None):
    """``u_i = a_i exp(-|x - center|^2 / width^2) exp(i momentum . x)``.

    ``center`` and ``momentum`` are ignored on radial grids.
    """
    if grid.is_radial:
        envelope = np.exp(-grid.radius() ** 2 / width ** 2)
    else:
        coords = grid.coordinates()
        center = np.zeros(grid.dimension) if center is None else np.asarray(center, dtype=float)
        envelope = np.exp(-sum((x - c) ** 2 for x, c in zip(coords, center)) / width ** 2)
        if momentum is not None:
            envelope = envelope * np.exp(1j * sum(k * x for k, x in zip(momentum, coords)))
    return FieldTriple(*(a * envelope for a in amplitudes), grid)


def random_smooth_triple(grid, rng, terms=3, scale=1.0):
    """Sum of ``terms`` Gaussians per component with random complex amplitudes.

    Widths are drawn from ``[0.6, 2.0]`` and centres (boxes only) from the
    middle half of the box, so the fields are smooth and vanish at the edges.
    """
    fields = []
    for _ in range(3):
        u = np.zeros(grid.shape, dtype=complex)
        for _ in range(terms):
            amp = scale * (rng.normal() + 1j * rng.normal())
            width = rng.uniform(0.6, 2.0)
            if grid.is_radial:
                u += amp * np.exp(-grid.radius() ** 2 / width ** 2)
            else:
                center = rng.uniform(-0.25, 0.25, size=grid.dimension) * grid.extent
                r2 = sum((x - c) ** 2 for x, c in zip(grid.coordinates(), center))
                u += amp * np.exp(-r2 / width ** 2)
        fields.append(u)
    return FieldTriple(*fields, grid)
