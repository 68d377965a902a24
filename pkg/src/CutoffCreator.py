import numpy as np

from src.constants import CUTOFF_EPS_RANGE
from src.errors import ValidationError


def _bump(t):
    """``exp(-1/t)`` for ``t > 0`` and ``0`` otherwise."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


class Cutoff:
    """Smooth radial cutoff ``chi`` with a transition layer of width ``Eps``.

    - ``chi(r) = 1`` for ``r <= 1 - Eps``,
    - ``chi(r) = 0`` for ``r >= 1``,
    - in between the standard infinitely differentiable interpolant
      ``g(1 - s) / (g(1 - s) + g(s))`` with ``g(t) = exp(-1/t)`` and
      ``s = (r - (1 - Eps)) / Eps``, which is nonincreasing.

    """
    def __init__(self, eps):
        self.Eps = eps

    Eps = property(doc="Width of the transition layer, inside ``(0.01, 0.5)``.")

    @Eps.getter
    def Eps(self):
        return self._eps

    @Eps.setter
    def Eps(self, value):
        lo, hi = CUTOFF_EPS_RANGE
        if not lo < value < hi:
            raise ValidationError("cutoff eps must lie in ({0}, {1}), got {2}".format(lo, hi, value))
        self._eps = float(value)

    @property
    def inner_radius(self):
        return 1.0 - self._eps

    def __call__(self, r):
        """``chi(|r|)``; accepts scalars and arrays."""
        r = np.abs(np.asarray(r, dtype=float))
        s = (r - self.inner_radius) / self._eps
        left = _bump(1.0 - s)
        right = _bump(s)
        total = left + right
        out = np.ones_like(r)
        layer = (s > 0) & (s < 1)
        out[layer] = left[layer] / total[layer]
        out[s >= 1] = 0.0
        return out if out.ndim else float(out)

    def scaled(self, r, R):
        """``chi(r / R)``."""
        return self(np.asarray(r, dtype=float) / R)

    def sample(self, n=1000, r_max=1.5):
        """Profile on ``n`` equispaced radii in ``[0, r_max]``."""
        r = np.linspace(0.0, r_max, n)
        return r, self(r)

    def __repr__(self):
        return "Cutoff(eps={0})".format(self._eps)


def build_cutoff(eps):
    return Cutoff(eps)
