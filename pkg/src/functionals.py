"""Conserved quantities and variational functionals of the three-wave system.

With ``u = (u1, u2, u3)`` and dispersion ``(kappa1, kappa2, kappa3)``:

- mass ``M = 1/2 |u1|^2 + 1/2 |u2|^2 + |u3|^2`` (integrated),
- kinetic ``K = sum kappa_i/2 |grad u_i|^2``,
- potential ``V = Re conj(u1) conj(u2) u3``,
- energy ``E = K - V``,
- momentum ``P = Im sum conj(u_i) grad u_i``.
"""
from dataclasses import dataclass

import numpy as np

from src.constants import POTENTIAL_FLOOR
from src.errors import OutsideXiError
from src.FieldTriple import FieldTriple
from src.grid import gradient, laplacian_kappa


@dataclass(frozen=True)
class ConservedSet:
    mass: float
    kinetic: float
    potential: float
    energy: float
    momentum: np.ndarray


@dataclass(frozen=True)
class WeinsteinValue:
    J2: float


@dataclass(frozen=True)
class ProductChecks:
    ME: float
    MK: float
    below_threshold: bool


@dataclass(frozen=True)
class DensityTerms:
    """Pointwise densities shared by the Morawetz machinery.

    ``L = sum kappa_i |grad u_i|^2``, ``A = Im sum conj(u_i) grad u_i``,
    ``S = sum |u_i|^2 / kappa_i``, ``N = kappa1 kappa2 kappa3 S``,
    ``W = sum kappa_i |u_i|^2`` and ``Z = conj(u1) conj(u2) u3``.
    ``grads[i][j]`` is ``d_j u_i``.
    """
    L: np.ndarray
    A: list
    S: np.ndarray
    N: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    grads: list


@dataclass(frozen=True)
class VariationalDerivatives:
    mass: FieldTriple
    kinetic: FieldTriple
    potential: FieldTriple


def mass_density(u):
    return 0.5 * np.abs(u.u1) ** 2 + 0.5 * np.abs(u.u2) ** 2 + np.abs(u.u3) ** 2


def mass(u):
    return u.grid.quadrature(mass_density(u))


def kinetic(u, p):
    g = u.grid
    density = np.zeros(g.shape)
    for kappa, ui in zip(p.kappas, u):
        density += 0.5 * kappa * sum(np.abs(dj) ** 2 for dj in gradient(ui, g))
    return g.quadrature(density)


def potential(u):
    return u.grid.quadrature(np.real(np.conj(u.u1) * np.conj(u.u2) * u.u3))


def energy(u, p):
    return kinetic(u, p) - potential(u)


def momentum(u):
    g = u.grid
    if g.is_radial:
        return np.zeros(g.dimension)
    density = [np.zeros(g.shape) for _ in range(g.dimension)]
    for ui in u:
        for j, dj in enumerate(gradient(ui, g)):
            density[j] += np.imag(np.conj(ui) * dj)
    return np.array([g.quadrature(dens) for dens in density])


def conserved(u, p):
    K = kinetic(u, p)
    V = potential(u)
    return ConservedSet(mass=mass(u), kinetic=K, potential=V, energy=K - V, momentum=momentum(u))


def weinstein(u, p):
    """Scale-invariant Weinstein quotient ``J2 = M K^5 / V^4``."""
    V = potential(u)
    if abs(V) < POTENTIAL_FLOOR:
        raise OutsideXiError()
    return WeinsteinValue(J2=mass(u) * kinetic(u, p) ** 5 / V ** 4)


def gn_gap(u, p, C_GN):
    """``C_GN M^(1/4) K^(5/4) - V``, nonnegative by the sharp Gagliardo-Nirenberg inequality."""
    assert C_GN > 0
    return C_GN * mass(u) ** 0.25 * kinetic(u, p) ** 1.25 - potential(u)


def coercivity_gap(u_boosted, u, p):
    return 4.0 * kinetic(u_boosted, p) - 5.0 * potential(u)


def product_checks(u, p, gs):
    M = mass(u)
    K = kinetic(u, p)
    E = K - potential(u)
    ME = M * E
    MK = M * K
    return ProductChecks(ME=ME, MK=MK, below_threshold=bool(ME < gs.ME_threshold and MK <= gs.MK_threshold))


def inverse_kappa_mass(u, p):
    """``sum int |u_i|^2 / kappa_i``."""
    return u.grid.quadrature(sum(np.abs(ui) ** 2 / k for ui, k in zip(u, p.kappas)))


def boosted_kinetic(u, xi, p):
    """Predicted ``K(u^xi) = K(u) + xi . P(u) + |xi|^2/2 sum int |u_i|^2 / kappa_i``."""
    xi = np.asarray(xi, dtype=float)
    return kinetic(u, p) + float(np.dot(xi, momentum(u))) + 0.5 * float(np.dot(xi, xi)) * inverse_kappa_mass(u, p)


def density_terms(u, p):
    g = u.grid
    grads = [gradient(ui, g) for ui in u]
    L = np.zeros(g.shape)
    A = [np.zeros(g.shape) for _ in range(len(grads[0]))]
    for kappa, ui, gi in zip(p.kappas, u, grads):
        L += kappa * sum(np.abs(dj) ** 2 for dj in gi)
        for j, dj in enumerate(gi):
            A[j] += np.imag(np.conj(ui) * dj)
    S = sum(np.abs(ui) ** 2 / k for ui, k in zip(u, p.kappas))
    W = sum(k * np.abs(ui) ** 2 for ui, k in zip(u, p.kappas))
    Z = np.conj(u.u1) * np.conj(u.u2) * u.u3
    return DensityTerms(L=L, A=A, S=S, N=p.kappa_product * S, W=W, Z=Z, grads=grads)


def h1_norm(u):
    """``(sum_i int |u_i|^2 + |grad u_i|^2)^(1/2)``."""
    g = u.grid
    density = sum(np.abs(ui) ** 2 + sum(np.abs(dj) ** 2 for dj in gradient(ui, g)) for ui in u)
    return float(np.sqrt(g.quadrature(density)))


def scaling_exponents(d):
    """Exponents ``(a, b)`` with ``F(mu u(nu .)) = mu^a nu^b F(u)`` for M, K and V."""
    return {'M': (2, -d), 'K': (2, 2 - d), 'V': (3, -d)}


def variational_derivatives(u, p):
    """First variations of M, K and V in the real pairing ``Re int conj(h) g``.

    ``dM + dK - dV`` vanishes exactly at solutions of the ground-state system.
    """
    g = u.grid
    dM = FieldTriple(u.u1, u.u2, 2.0 * u.u3, g)
    dK = u.map(lambda ui, i: -laplacian_kappa(ui, p.kappas[i], g))
    dV = FieldTriple(np.conj(u.u2) * u.u3, np.conj(u.u1) * u.u3, u.u1 * u.u2, g)
    return VariationalDerivatives(mass=dM, kinetic=dK, potential=dV)
